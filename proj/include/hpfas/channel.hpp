// SPDX-License-Identifier: Apache-2.0

#ifndef HPFAS_CHANNEL_HPP
#define HPFAS_CHANNEL_HPP

#include "hpfas/model.hpp"
#include "hpfas/rng.hpp"

#include <Eigen/Core>

#include <complex>
#include <vector>

namespace hpfas {

/// One draw of the N port gains of a single transmitter-receiver link.
struct ChannelRealization {
  Eigen::VectorXcd port_gains;
  double los_phase = 0.0; // 2 pi d / lambda + 2 pi d0 / lambda_g, radians
  double distance = 0.0;  // m
};

/// Standard normal pairs behind one NLoS draw: one common pair per block and
/// one local pair per port, each stored as real + j imag.
struct NlosDraw {
  Eigen::VectorXcd block_common;
  Eigen::VectorXcd port_local;
};

/// sqrt(eta0 / d^eps) exp(-j 2 pi d / lambda) exp(-j 2 pi d0 / lambda_g).
std::complex<double> los_gain(double d, double d0, const SystemParams& p);

/// Draws block by block: the common pair of block b, then the local pair of each of its ports.
NlosDraw draw_nlos(const BlockStructure& blocks, RngStream& rng);

/// sqrt(1 - mu^2) local_n + mu common_b(n), componentwise.
Eigen::VectorXcd compose_nlos(const BlockStructure& blocks, double mu, const NlosDraw& draw);

Eigen::VectorXcd sample_nlos_block(const BlockStructure& blocks, double mu, RngStream& rng);

/// Rician port gains sqrt(beta(d)) (sqrt(kappa/(kappa+1)) LoS + sqrt(1/(2(kappa+1))) NLoS)
/// for a transmitter at `tx` and a receiver at `rx`, feed distance d0.
ChannelRealization compose_channel(const Eigen::Vector3d& rx, const Eigen::Vector3d& tx, double d0,
                                   const SystemParams& p, const Eigen::VectorXcd& nlos);

ChannelRealization sample_channel(const Eigen::Vector3d& rx, const Eigen::Vector3d& tx, double d0,
                                  const SystemParams& p, const BlockStructure& blocks,
                                  RngStream& rng);

/// K waveguides with M pinching antennas each; waveguide k serves user k.
struct MultiUserLayout {
  std::vector<std::vector<Eigen::Vector3d>> antennas;          // [k][m]
  std::vector<std::vector<std::complex<double>>> weights;      // [k][m], unit norm per k
  std::vector<double> feed_offsets;                             // [k], m

  int num_users() const { return static_cast<int>(antennas.size()); }
  /// Throws ValidationError on ragged shapes or weights that are not unit norm.
  void validate() const;
};

/// Channels from every antenna of every waveguide to every user:
/// result[user][waveguide][antenna]. Each link fades independently; links are
/// drawn in that index order. The feed distance of antenna m on waveguide k is
/// feed_offsets[k] + its x coordinate.
std::vector<std::vector<std::vector<ChannelRealization>>>
sample_multiuser_channels(const MultiUserLayout& layout, const std::vector<Eigen::Vector3d>& users,
                          const SystemParams& p, const BlockStructure& blocks, RngStream& rng);

} // namespace hpfas

#endif // HPFAS_CHANNEL_HPP
