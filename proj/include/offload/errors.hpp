#pragma once

#include <stdexcept>
#include <string>

namespace offload {

struct ZeroDistance : std::runtime_error {
  explicit ZeroDistance(const std::string& what) : std::runtime_error(what) {}
};

struct InfeasibleSecrecy : std::runtime_error {
  explicit InfeasibleSecrecy(const std::string& what) : std::runtime_error(what) {}
};

struct RouteConflict : std::runtime_error {
  explicit RouteConflict(const std::string& what) : std::runtime_error(what) {}
};

struct NoSecureTarget : std::runtime_error {
  explicit NoSecureTarget(const std::string& what) : std::runtime_error(what) {}
};

struct MaskViolation : std::runtime_error {
  explicit MaskViolation(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyMask : std::runtime_error {
  explicit EmptyMask(const std::string& what) : std::runtime_error(what) {}
};

struct GroupSizeMismatch : std::runtime_error {
  explicit GroupSizeMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientData : std::runtime_error {
  explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteLoss : std::runtime_error {
  explicit NonFiniteLoss(const std::string& what) : std::runtime_error(what) {}
};

struct InstanceTooLarge : std::runtime_error {
  explicit InstanceTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace offload
