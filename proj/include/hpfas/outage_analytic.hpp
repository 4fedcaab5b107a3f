// SPDX-License-Identifier: Apache-2.0

#ifndef HPFAS_OUTAGE_ANALYTIC_HPP
#define HPFAS_OUTAGE_ANALYTIC_HPP

#include "hpfas/model.hpp"
#include "hpfas/quad.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>

namespace hpfas {

enum class AnalyticMethod {
  hpfas_exact,
  hpfas_sfa,
  pa_only,
  fa_only_exact,
  fa_only_sfa,
  mu_hpfas_exact,
  mu_hpfas_sfa,
  mu_pa_only_closed,
  mu_fa_only_exact,
};

std::string to_string(AnalyticMethod m);
std::optional<AnalyticMethod> parse_analytic_method(const std::string& name);
bool is_two_user(AnalyticMethod m);

/// Threshold constant used by the single-antenna pinching baseline.
/// port_marginal: (1 - mu^2) C, the value the exact HPFAS integral reduces to at N = 1.
/// block_scaled: C itself, keeping its 1/(1 - mu^2) factor.
enum class PaOnlyThreshold { port_marginal, block_scaled };

std::string to_string(PaOnlyThreshold t);
std::optional<PaOnlyThreshold> parse_pa_only_threshold(const std::string& name);

// Per-block kernels. Each depends on the user position only through one scalar,
// which is what lets KernelCache tabulate them.

/// P(all L ports of a block are in outage) at threshold constant C:
/// int_0^inf ncchi2_pdf(r, 2 kappa/mu^2) [1 - Q1(sqrt(mu^2 r/(1-mu^2)), sqrt C)]^L dr.
quad::QuadResult block_outage(double C, int L, double kappa, double mu, const quad::QuadSpec& spec);

/// P(|h_desired|^2 < gamma_tilde |h_interf|^2) for one port given the block variables
/// r (desired link) and r_tilde (interfering link), clamped to [0, 1].
double sir_port_outage(double r, double r_tilde, double gamma_tilde, double mu);

/// Block SIR outage: double integral of sir_port_outage^L against both densities.
quad::QuadResult sir_block_outage(double gamma_tilde, int L, double kappa, double mu,
                                  const quad::QuadSpec& spec);

/// Step-function counterpart of sir_block_outage:
/// int_0^inf ncchi2_pdf(r, 2 kappa/mu^2) Q1(sqrt(2 kappa/mu^2), sqrt(sfa_delta_mu(r, L))) dr.
quad::QuadResult sir_sfa_block_outage(double gamma_tilde, int L, double kappa, double mu,
                                      const quad::QuadSpec& spec);

/// Two-user outage of single-antenna receivers at SIR threshold gamma_tilde:
/// Q1(sqrt(2 kappa g/(1+g)), sqrt(2 kappa/(1+g))) - exp(-kappa)/(1+g) I0(2 kappa sqrt(g)/(1+g)).
double pa_only_mu_kernel(double gamma_tilde, double kappa);

/// Shared interpolation tables for the per-block kernels, keyed by kernel kind,
/// kappa, mu, block size and the quadrature settings. Thread-safe.
class KernelCache {
public:
  enum class Kind { block_outage, sir_block, sir_sfa_block };

  const quad::LogChebyshevTable& table(Kind kind, double kappa, double mu, int L,
                                       const quad::QuadSpec& spec);
  std::size_t size() const;

private:
  using Key = std::tuple<int, double, double, int, double, double, double, int>;
  mutable std::mutex mutex_;
  std::map<Key, std::unique_ptr<quad::LogChebyshevTable>> tables_;
};

struct AnalyticOptions {
  quad::QuadSpec spec;
  PaOnlyThreshold pa_only_threshold = PaOnlyThreshold::port_marginal;
  int user = 1;                  // which user of the two-user layout (1 or 2)
  KernelCache* cache = nullptr;  // optional; a private cache is used otherwise
};

OutageEstimate outage_hpfas_exact(const ScenarioSingleUser& s, const AnalyticOptions& opt = {});
OutageEstimate outage_hpfas_sfa(const ScenarioSingleUser& s, const AnalyticOptions& opt = {});
OutageEstimate outage_pa_only(const ScenarioSingleUser& s, const AnalyticOptions& opt = {});
OutageEstimate outage_fa_only_exact(const ScenarioSingleUser& s, const AnalyticOptions& opt = {});
OutageEstimate outage_fa_only_sfa(const ScenarioSingleUser& s, const AnalyticOptions& opt = {});

OutageEstimate outage_mu_hpfas_exact(const ScenarioTwoUser& s, const AnalyticOptions& opt = {});
OutageEstimate outage_mu_hpfas_sfa(const ScenarioTwoUser& s, const AnalyticOptions& opt = {});
OutageEstimate outage_mu_pa_only_closed(const ScenarioTwoUser& s, const AnalyticOptions& opt = {});
OutageEstimate outage_mu_fa_only_exact(const ScenarioTwoUser& s, const AnalyticOptions& opt = {});

OutageEstimate evaluate(AnalyticMethod m, const ScenarioSingleUser& s, const AnalyticOptions& opt = {});
OutageEstimate evaluate(AnalyticMethod m, const ScenarioTwoUser& s, const AnalyticOptions& opt = {});

} // namespace hpfas

#endif // HPFAS_OUTAGE_ANALYTIC_HPP
