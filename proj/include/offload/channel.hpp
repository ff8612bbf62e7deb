#pragma once

#include "offload/errors.hpp"

namespace offload {

inline constexpr double kSpeedOfLight = 3.0e8;  // m/s

/// dBm -> watts.
double dbm_to_watt(double dbm);

/// Air-to-ground propagation and radio parameters. All values are SI
/// (watts, Hz); dBm inputs are converted once at configuration load.
struct ChannelParams {
  double a = 11.25;           // environment constant (rural)
  double b = 0.06;            // environment constant (rural)
  double eta_los = 1.0;       // excess path loss, LoS (linear)
  double eta_nlos = 10.0;     // excess path loss, NLoS (linear)
  double carrier_freq = 2.4e9;    // Hz
  double path_loss_exp = 3.0;     // iota
  double bandwidth = 20e6;        // Hz
  double noise_power = 2.5118864315095823e-13;  // -96 dBm, watts
  double p_device = 0.03162277660168379;        // 15 dBm, watts
  double p_uav = 0.19952623149688797;           // 23 dBm, watts
};

/// K0 = 4 pi f_c / c.
double wavenumber_k0(const ChannelParams& p);

/// LoS probability 1 / (1 + a exp(-b (theta - a))), strictly in (0, 1) and
/// increasing in theta.
double los_probability(double theta_deg, const ChannelParams& p);

/// Mean path loss (linear). With los_only the NLoS branch is dropped:
/// eta_los * (K0 d)^iota. Otherwise the LoS/NLoS mixture applies.
/// Throws ZeroDistance for dist = 0.
double mean_path_loss(double p_los, double dist, const ChannelParams& p,
                      bool los_only = false);

/// Channel gain is the reciprocal of the mean path loss.
double channel_gain(double p_los, double dist, const ChannelParams& p,
                    bool los_only = false);

/// Shannon rate of a shared-bandwidth link:
/// (B / share_count) * log2(1 + tx_power * gain / noise), bits/s.
double link_rate(double bandwidth, int share_count, double tx_power,
                 double gain, double noise);

/// max(legit - eavesdrop, 0), bits/s.
double secrecy_rate(double legit, double eavesdrop);

/// data_size / secrecy, seconds. Throws InfeasibleSecrecy when the secrecy
/// rate is zero and there is payload to carry.
double secure_tx_time(double data_size_bits, double secrecy_bits_per_s);

/// power * time, joules.
double tx_energy(double tx_power, double time_s);

struct SecrecyLink {
  double legit_rate = 0.0;
  double eve_rate = 0.0;
  double secrecy = 0.0;
};

}  // namespace offload
