#include "offload/channel.hpp"

#include <cmath>

namespace offload {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double wavenumber_k0(const ChannelParams& p) {
  return 4.0 * M_PI * p.carrier_freq / kSpeedOfLight;
}

double los_probability(double theta_deg, const ChannelParams& p) {
  return 1.0 / (1.0 + p.a * std::exp(-p.b * (theta_deg - p.a)));
}

double mean_path_loss(double p_los, double dist, const ChannelParams& p,
                      bool los_only) {
  if (dist <= 0.0) {
    throw ZeroDistance("mean_path_loss: zero distance");
  }
  const double free_space = std::pow(wavenumber_k0(p) * dist, p.path_loss_exp);
  if (los_only) {
    return p.eta_los * free_space;
  }
  return (p.eta_los * p_los + p.eta_nlos * (1.0 - p_los)) * free_space;
}

double channel_gain(double p_los, double dist, const ChannelParams& p,
                    bool los_only) {
  return 1.0 / mean_path_loss(p_los, dist, p, los_only);
}

double link_rate(double bandwidth, int share_count, double tx_power,
                 double gain, double noise) {
  return bandwidth / share_count * std::log2(1.0 + tx_power * gain / noise);
}

double secrecy_rate(double legit, double eavesdrop) {
  return std::max(legit - eavesdrop, 0.0);
}

double secure_tx_time(double data_size_bits, double secrecy_bits_per_s) {
  if (data_size_bits == 0.0) return 0.0;
  if (secrecy_bits_per_s <= 0.0) {
    throw InfeasibleSecrecy("secure_tx_time: zero secrecy rate with payload");
  }
  return data_size_bits / secrecy_bits_per_s;
}

double tx_energy(double tx_power, double time_s) { return tx_power * time_s; }

}  // namespace offload
