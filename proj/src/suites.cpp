#include "cidlab/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "cidlab/error.hpp"
#include "cidlab/oracle.hpp"
#include "cidlab/serialization.hpp"

namespace cidlab {

namespace {

using Reports = std::vector<VerificationReport>;

// Standard urn w = r = 1 with deterministic d.
PolyaUrnSpec urn(std::vector<std::uint64_t> d, bool cycle = false) {
  PolyaUrnSpec s;
  s.reinforcement = reinforcement::Deterministic{std::move(d), cycle};
  return s;
}

// d_n uniform on {1, 2}: delta = 1/9.
PolyaUrnSpec urn_iid_12() {
  PolyaUrnSpec s;
  s.reinforcement = reinforcement::Iid{dist::Discrete{{0.0, 1.0, 1.0}}};
  return s;
}

DeFinettiSpec iid(Kernel k, double theta = 0.0) { return {dist::Normal{theta, 0.0}, k}; }
DeFinettiSpec iid_uniform() { return iid(kernel::Uniform{1.0}); }
DeFinettiSpec iid_normal() { return iid(kernel::Normal{1.0}); }
DeFinettiSpec beta_bernoulli() { return {dist::Beta{1.0, 1.0}, kernel::Bernoulli{}}; }

CompensatedGaussianSpec gaussian(double u = 0.5) { return {1.0, ClosedFormSchedule{u}}; }

std::vector<double> linspace(double lo, double hi, std::size_t m) {
  std::vector<double> g(m);
  for (std::size_t i = 0; i < m; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1);
  return g;
}

ExperimentConfig base_config(std::string id, int criterion, ProcessSpec process, std::size_t n,
                             std::size_t replicas, std::uint64_t seed, Execution exec) {
  ExperimentConfig c;
  c.seed = derive_seed(seed, id);
  c.id = std::move(id);
  c.criterion = criterion;
  c.process = std::move(process);
  c.n = n;
  c.replicas = replicas;
  c.exec = exec;
  return c;
}

VerificationReport exact_report(std::string id, int criterion, std::string description,
                                bool ok, json details) {
  VerificationReport r;
  r.id = std::move(id);
  r.criterion = criterion;
  r.description = std::move(description);
  r.statistic = ok ? 0.0 : 1.0;
  r.threshold = 0.5;
  r.details = std::move(details);
  r.decide();
  return r;
}

VerificationReport band_report(const ExperimentConfig& c, std::vector<double> deviations,
                               double tolerance, std::string description) {
  VerificationReport r;
  r.id = c.id;
  r.criterion = c.criterion;
  r.seed = c.seed;
  r.description = std::move(description);
  for (double& v : deviations) v = std::abs(v);
  r.summary = summarize(deviations);
  r.statistic = quantile(deviations, 0.95);
  r.threshold = tolerance;
  r.details = {{"n", c.n}, {"replicas", c.replicas}, {"test", "band_check"}};
  r.plot = "histogram";
  r.samples = std::move(deviations);
  r.decide();
  return r;
}

template <class Fn>
std::vector<double> per_path(const ExperimentConfig& c, Fn&& fn) {
  return map_replicas<double>(c.process, c.n, c.replicas, c.seed, c.exec,
                              [&](const PathSample& p, Stream&, std::size_t) { return fn(p); });
}

// ---------------------------------------------------------------------------

Reports oracle_suite(std::uint64_t seed, Execution exec) {
  Reports out;
  const auto standard = urn({1});
  const auto modified = urn({1, 2, 2});
  const auto one_two = urn({1, 2});

  auto cid_std = check_cid_eq5(standard, 4);
  out.push_back(exact_report("oracle_cid_standard_urn", 1, "exact c.i.d. check, standard urn, n_max 4",
                             cid_std.holds, {{"certificate", to_json(cid_std.certificate)}}));
  auto cid_mod = check_cid_eq5(modified, 4);
  out.push_back(exact_report("oracle_cid_modified_urn", 1, "exact c.i.d. check, d = (1,2,2), n_max 4",
                             cid_mod.holds, {{"certificate", to_json(cid_mod.certificate)}}));
  auto ex_std = check_exchangeable(enumerate_polya_joint(standard, 4));
  out.push_back(exact_report("oracle_exchangeable_standard_urn", 1,
                             "standard urn exchangeable at depth 4", ex_std.holds,
                             {{"certificate", to_json(ex_std.certificate)}}));
  auto ex_mod = check_exchangeable(enumerate_polya_joint(one_two, 3));
  const auto& cert = ex_mod.certificate;
  const bool witness = !ex_mod.holds && ((cert.lhs == Rational(1, 15) && cert.rhs == Rational(1, 10)) ||
                                         (cert.lhs == Rational(1, 10) && cert.rhs == Rational(1, 15)));
  out.push_back(exact_report("oracle_not_exchangeable_d12", 1,
                             "d = (1,2) at depth 3 is not exchangeable, witness 1/10 vs 1/15", witness,
                             {{"certificate", to_json(cert)}}));

  // Permuted c.i.d. round trip over every permutation of the first 4 indices.
  auto permutations_failing = [](const PolyaUrnSpec& spec, int depth) {
    const auto joint = enumerate_polya_joint(spec, depth);
    std::vector<int> head{1, 2, 3, 4};
    std::size_t failing = 0, total = 0;
    json first_failure = nullptr;
    do {
      std::vector<int> tau = head;
      for (int i = 5; i <= depth; ++i) tau.push_back(i);
      const auto res = check_permuted_cid(joint, tau);
      ++total;
      if (!res.holds) {
        if (first_failure.is_null())
          first_failure = {{"tau", tau}, {"certificate", to_json(res.certificate)}};
        ++failing;
      }
    } while (std::next_permutation(head.begin(), head.end()));
    return std::tuple{failing, total, first_failure};
  };
  {
    auto [failing, total, first] = permutations_failing(standard, 6);
    out.push_back(exact_report("oracle_permuted_cid_standard_urn", 2,
                               "every permutation of the first 4 indices keeps the standard urn c.i.d.",
                               failing == 0,
                               {{"permutations", total}, {"failing", failing}, {"first_failure", first}}));
  }
  {
    auto [failing, total, first] = permutations_failing(one_two, 6);
    out.push_back(exact_report("oracle_permuted_cid_d12", 2,
                               "some permutation of the first 4 indices breaks c.i.d. for d = (1,2)",
                               failing >= 1,
                               {{"permutations", total}, {"failing", failing}, {"first_failure", first}}));
    const std::vector<int> swap{2, 1, 3, 4};
    const auto res = check_permuted_cid(one_two, swap, 4);
    out.push_back(exact_report("oracle_permuted_cid_d12_swap", 2,
                               "the swap (1 2) at depth 4 breaks c.i.d. for d = (1,2)", !res.holds,
                               {{"certificate", to_json(res.certificate)}}));
  }

  // Gaussian counterpart of the c.i.d. check: Gamma restricted to (1..n, n+2)
  // equals Gamma restricted to (1..n, n+1).
  {
    const std::size_t n = 8;
    const Eigen::MatrixXd g = gamma_matrix(gaussian(), n + 2);
    bool ok = true;
    for (std::size_t m = 0; m < n; ++m) {
      std::vector<Eigen::Index> skip(m), next(m);
      std::iota(skip.begin(), skip.end(), 0);
      std::iota(next.begin(), next.end(), 0);
      skip.push_back(static_cast<Eigen::Index>(m + 1));
      next.push_back(static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i <= m; ++i)
        for (std::size_t j = 0; j <= m; ++j)
          ok = ok && g(skip[i], skip[j]) == g(next[i], next[j]);
    }
    out.push_back(exact_report("oracle_gaussian_gamma_extension", 0,
                               "Gamma matrix satisfies the Gaussian form of the c.i.d. check", ok,
                               {{"n_max", n}}));
  }

  // Generator frequencies against the exact atoms.
  {
    const int depth = 4;
    const auto joint = enumerate_polya_joint(modified, depth);
    auto c = base_config("oracle_vs_generator_modified_urn", 0, modified, depth, 100000, seed, exec);
    const auto atoms = per_path(c, [](const PathSample& p) {
      std::vector<int> bits(p.x.begin(), p.x.end());
      return static_cast<double>(ExactJointLaw::index_of(bits));
    });
    std::vector<double> counts(joint.pmf.size(), 0.0);
    for (double a : atoms) counts[static_cast<std::size_t>(a)] += 1.0;
    const double R = static_cast<double>(c.replicas);
    std::vector<double> z;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const double p = static_cast<double>(joint.pmf[i]);
      z.push_back(p > 0.0 ? (counts[i] / R - p) / std::sqrt(p * (1.0 - p) / R) : counts[i]);
    }
    VerificationReport r;
    r.id = c.id;
    r.seed = c.seed;
    r.description = "generator atom frequencies within 5 standard errors of the exact law";
    for (double& v : z) v = std::abs(v);
    r.summary = summarize(z);
    r.statistic = *std::max_element(z.begin(), z.end());
    r.threshold = 5.0;
    r.details = {{"replicas", c.replicas}, {"depth", depth}, {"abs_z", z}};
    r.decide();
    out.push_back(std::move(r));
  }
  return out;
}

// Var[W_n] for the closed-form schedule, summed term by term.
double exact_w_variance(const CompensatedGaussianSpec& s, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double km1 = static_cast<double>(k - 1);
    acc += s.c - s.b(k) + km1 * km1 * (s.b(k) - s.b(k - 1));
  }
  return acc / static_cast<double>(n) + static_cast<double>(n) * (s.c - s.b(n));
}

Reports gaussian_suite(std::uint64_t seed, Execution exec) {
  Reports out;
  const auto g = gaussian(0.5);
  const double u = 0.5;

  {
    auto c = base_config("gaussian_covariance", 3, g, 3, 100000, seed, exec);
    const auto start = std::chrono::steady_clock::now();
    auto triples = map_replicas<std::array<double, 3>>(
        g, 3, c.replicas, c.seed, exec,
        [](const PathSample& p, Stream&, std::size_t) { return std::array<double, 3>{p.x[0], p.x[1], p.x[2]}; });
    const Eigen::MatrixXd gamma = gamma_matrix(g, 3);
    Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& t : triples) {
      const Eigen::Vector3d v(t[0], t[1], t[2]);
      mean += v;
      sum += v * v.transpose();
    }
    const double R = static_cast<double>(triples.size());
    mean /= R;
    const Eigen::Matrix3d cov = (sum - R * mean * mean.transpose()) / (R - 1.0);
    const double dev = (cov - gamma).cwiseAbs().maxCoeff();
    VerificationReport r;
    r.id = c.id;
    r.criterion = 3;
    r.seed = c.seed;
    r.description = "empirical covariance of generated triples matches the Gamma matrix";
    r.statistic = dev;
    r.threshold = 0.02;
    json emp = json::array(), exact = json::array();
    for (int i = 0; i < 3; ++i) {
      emp.push_back({cov(i, 0), cov(i, 1), cov(i, 2)});
      exact.push_back({gamma(i, 0), gamma(i, 1), gamma(i, 2)});
    }
    r.details = {{"replicas", c.replicas}, {"empirical", emp}, {"gamma", exact}};
    r.decide();
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  }

  {
    auto c = base_config("gaussian_exact_w_variance", 4, g, 10, 20000, seed, exec);
    json per_n = json::array();
    double worst = 0.0;
    for (std::size_t n : {10u, 100u}) {
      c.n = n;
      const auto w = per_path(c, [](const PathSample& p) {
        return centered_stat(p, FunctionDescriptor::identity(), Centering::W);
      });
      const auto s = summarize(w);
      const double exact = exact_w_variance(g, n);
      const double se = s.variance * std::sqrt(2.0 / (static_cast<double>(w.size()) - 1.0));
      const double z = std::abs(s.variance - exact) / se;
      worst = std::max(worst, z);
      per_n.push_back({{"n", n}, {"simulated", s.variance}, {"exact", exact}, {"standard_error", se}, {"z", z}});
    }
    VerificationReport r;
    r.id = c.id;
    r.criterion = 4;
    r.seed = c.seed;
    r.description = "simulated Var[W_n] matches the closed form within 5 standard errors";
    r.statistic = worst;
    r.threshold = 5.0;
    r.details = {{"replicas", c.replicas}, {"per_n", per_n}};
    r.decide();
    out.push_back(std::move(r));
  }

  const std::size_t n = 10000, R = 2000;
  {
    auto c = base_config("gaussian_w_limit", 5, g, n, R, seed, exec);
    c.statistic = {Centering::W, FunctionDescriptor::identity(), {}, false};
    c.limit = limit::Normal{2.0 * u};
    c.tolerance = 0.045;
    auto r = clt_experiment(c);
    r.description = "W_n / sqrt(2u) against the standard normal";
    out.push_back(std::move(r));

    c.id = "gaussian_w_negative_control";
    c.criterion = 0;
    c.control = Control::doubled_variance;
    r = clt_experiment(c);
    r.description = "negative control: W_n tested against N(0, 4u) must be rejected";
    out.push_back(std::move(r));
  }
  {
    auto c = base_config("gaussian_c_limit", 5, g, n, R, seed, exec);
    c.statistic = {Centering::C, FunctionDescriptor::identity(), {}, false};
    c.limit = limit::Normal{u};
    c.tolerance = 0.045;
    auto r = clt_experiment(c);
    r.description = "C_n / sqrt(u) against the standard normal";
    out.push_back(std::move(r));

    c.id = "gaussian_c_negative_control";
    c.criterion = 0;
    c.control = Control::doubled_variance;
    r = clt_experiment(c);
    r.description = "negative control: C_n tested against N(0, 2u) must be rejected";
    out.push_back(std::move(r));
  }
  {
    auto c = base_config("gaussian_b_vanishes", 5, g, n, R, seed, exec);
    c.statistic = {Centering::B, FunctionDescriptor::identity(), {}, false};
    c.limit = limit::Degenerate{};
    c.test = TestKind::variance_bound;
    c.tolerance = 2e-3;
    auto r = clt_experiment(c);
    double harmonic = 0.0;
    for (std::size_t k = 1; k < n; ++k) harmonic += 1.0 / static_cast<double>(k);
    r.details["exact_variance"] = (1.0 + u * harmonic) / static_cast<double>(n);
    r.description = "sample variance of B_n below 2e-3";
    out.push_back(std::move(r));
  }
  return out;
}

Reports urn_clt_suite(std::uint64_t seed, Execution exec) {
  Reports out;
  const std::size_t n = 10000, R = 2000;
  {
    auto c = base_config("urn_c_standardized", 6, urn_iid_12(), n, R, seed, exec);
    c.tolerance = 0.045;
    auto r = polya_clt_experiment(c);
    r.description = "C_n / sqrt(delta V(1 - V)) against the standard normal, d uniform on {1, 2}";
    out.push_back(std::move(r));

    c.id = "urn_c_negative_control";
    c.control = Control::unstandardized;
    r = polya_clt_experiment(c);
    r.description = "negative control: unstandardized C_n against the standard normal must be rejected";
    out.push_back(std::move(r));
  }
  {
    auto c = base_config("urn_c_mixture_two_sample", 0, urn_iid_12(), n, R, seed, exec);
    const double delta = reinforcement_dispersion(urn_iid_12());
    c.statistic = {Centering::C, FunctionDescriptor::identity(), {}, false};
    c.limit = limit::PathNormal{[delta](const PathSample& p) {
      const double v = p.predictive_mean.back();
      return delta * v * (1.0 - v);
    }};
    c.test = TestKind::ks_two_sample;
    auto r = clt_experiment(c);
    r.description = "C_n against draws of the mixture N(0, delta V(1 - V))";
    out.push_back(std::move(r));
  }
  {
    auto c = base_config("urn_constant_d_c_vanishes", 0, urn({1}), n, R, seed, exec);
    auto r = polya_clt_experiment(c);
    r.description = "constant d: sample variance of C_n below 2e-3";
    out.push_back(std::move(r));
  }
  return out;
}

Reports slln_suite(std::uint64_t seed, Execution exec) {
  Reports out;
  const std::size_t n = 10000, R = 1000;
  const auto mean_gap = [](const PathSample& p) {
    const auto f = FunctionDescriptor::identity();
    return centered_stat(p, f, Centering::W) / std::sqrt(static_cast<double>(p.size()));
  };
  {
    auto c = base_config("slln_gaussian", 7, gaussian(0.5), n, R, seed, exec);
    out.push_back(band_report(c, per_path(c, mean_gap), 0.025,
                              "95th percentile of |mean_n - V| for the Gaussian family"));
  }
  {
    auto c = base_config("slln_urn", 7, urn({1, 2, 2}), n, R, seed, exec);
    const auto gaps = per_path(c, [](const PathSample& p) {
      return centered_stat(p, FunctionDescriptor::identity(), Centering::C) /
             std::sqrt(static_cast<double>(p.size()));
    });
    out.push_back(band_report(c, gaps, 0.05, "95th percentile of |mean_n - a_n| for the urn family"));
  }
  {
    auto c = base_config("slln_block_product_iid_bernoulli", 7, iid(kernel::Bernoulli{}, 0.5), n, R,
                         seed, exec);
    const std::vector<FunctionDescriptor> fs{FunctionDescriptor::identity(), FunctionDescriptor::identity()};
    const auto dev = per_path(c, [&](const PathSample& p) { return block_product_mean(p, fs) - 0.25; });
    out.push_back(band_report(c, dev, 0.02, "block product mean with k = 2 within 0.02 of 0.25"));
  }
  return out;
}

Reports empirical_suite(std::uint64_t seed, Execution exec) {
  Reports out;
  const std::size_t n = 10000, R = 1000;
  {
    auto c = base_config("empirical_kolmogorov_iid_uniform", 8, iid_uniform(), n, R, seed, exec);
    c.statistic = {Centering::W, std::nullopt, linspace(0.0, 1.0, 512), true};
    c.limit = limit::Kolmogorov{};
    c.tolerance = 0.065;
    auto r = empirical_process_experiment(c);
    r.description = "sup norm of the W process against the Kolmogorov law";
    out.push_back(std::move(r));

    c.id = "empirical_kolmogorov_negative_control";
    c.criterion = 0;
    c.control = Control::doubled_variance;
    r = empirical_process_experiment(c);
    r.description = "negative control: sup norm against sqrt(2) times the Kolmogorov law must be rejected";
    out.push_back(std::move(r));
  }
  const auto binary_grid = linspace(-0.5, 1.5, 512);
  {
    auto c = base_config("empirical_gf_beta_bernoulli", 9, beta_bernoulli(), n, R, seed, exec);
    c.statistic = {Centering::W, std::nullopt, binary_grid, true};
    c.limit = limit::GFSupNorm{RandomDistributionFunction::bernoulli_beta(1.0, 1.0)};
    c.test = TestKind::ks_two_sample;
    c.tolerance = 0.091;
    auto r = empirical_process_experiment(c);
    r.description = "sup norm of the W process against sup norms of G^F, F ~ Bernoulli(Beta(1,1))";
    out.push_back(std::move(r));

    c.id = "empirical_gf_beta_bernoulli_negative_control";
    c.criterion = 0;
    c.control = Control::doubled_variance;
    r = empirical_process_experiment(c);
    r.description = "negative control: G^F draws scaled by sqrt(2) must be rejected";
    out.push_back(std::move(r));
  }
  {
    auto c = base_config("empirical_b_process_beta_bernoulli", 0, beta_bernoulli(), n, R, seed, exec);
    c.statistic = {Centering::B, std::nullopt, binary_grid, true};
    c.limit = limit::GFSupNorm{RandomDistributionFunction::bernoulli_beta(1.0, 1.0)};
    c.test = TestKind::ks_two_sample;
    auto r = empirical_process_experiment(c);
    r.description = "sup norm of the B process against sup norms of G^F";
    out.push_back(std::move(r));
  }
  {
    auto c = base_config("empirical_c_process_urn_sigma", 0, urn_iid_12(), n, R, seed, exec);
    c.statistic = {Centering::C, std::nullopt, {-0.5, 0.0, 0.5, 1.0}, false};
    c.limit = limit::PathSigma{};
    c.test = TestKind::ks_two_sample;
    auto r = empirical_process_experiment(c);
    r.description = "sup norm of the C process against the Gaussian limit with estimated sigma(s, t)";
    out.push_back(std::move(r));
  }
  return out;
}

Reports predictive_suite(std::uint64_t seed, Execution exec) {
  Reports out;
  {
    auto c = base_config("predictive_uniform_urn", 10, urn({1, 2, 2}), 10000, 1000, seed, exec);
    c.tolerance = 0.05;
    auto r = uniform_convergence_test(c);
    r.description = "95th percentile of sup_t |mu_n - a_n| decreasing, below 0.05 at n = 10^4";
    out.push_back(std::move(r));
  }
  {
    auto c = base_config("predictive_uniform_iid_uniform", 0, iid_uniform(), 10000, 1000, seed, exec);
    c.tolerance = 0.025;
    auto r = uniform_convergence_test(c);
    r.description = "i.i.d. uniform: 95th percentile of sup_t |mu_n - a_n| below 0.025";
    out.push_back(std::move(r));
  }
  const std::vector<std::size_t> ms{10, 100, 1000};
  for (const auto& [id, spec] : std::vector<std::pair<std::string, ProcessSpec>>{
           {"asymptotic_exchangeability_standard_urn", urn({1})},
           {"asymptotic_exchangeability_iid_bernoulli", iid(kernel::Bernoulli{}, 0.5)},
           {"asymptotic_exchangeability_alternating_urn", urn({1, 2}, true)}}) {
    auto c = base_config(id, 0, spec, 1, 20000, seed, exec);
    auto r = asymptotic_exchangeability_test(c, ms);
    r.description = "swap asymmetry at m = 1000 within 3 standard errors of 0";
    out.push_back(std::move(r));
  }
  {
    // Exact pair asymmetry of the alternating urn from the oracle.
    const auto joint = enumerate_polya_joint(urn({1, 2}, true), kMaxEnumerationDepth);
    std::vector<double> gaps;
    json exact = json::array();
    for (int m = 0; m + 3 <= kMaxEnumerationDepth; ++m) {
      const Rational g = swap_asymmetry(joint, m);
      gaps.push_back(std::abs(static_cast<double>(g)));
      exact.push_back(to_json(g));
    }
    bool decays = gaps.back() > 0.0 && gaps.back() < gaps.front();
    VerificationReport r = exact_report("asymptotic_exchangeability_alternating_exact", 0,
                                        "exact swap asymmetry of the alternating urn decays",
                                        decays, {{"gaps", exact}, {"abs_gaps", gaps}});
    r.plot = "curve";
    r.samples = gaps;
    out.push_back(std::move(r));
  }
  for (const auto& [id, spec] : std::vector<std::pair<std::string, ProcessSpec>>{
           {"martingale_increments_gaussian", gaussian(0.5)},
           {"martingale_increments_urn", urn_iid_12()},
           {"martingale_increments_iid_normal", iid_normal()}}) {
    auto c = base_config(id, 0, spec, 10000, 200, seed, exec);
    auto r = martingale_increment_diagnostic(c);
    r.description = "95th percentile of max_k |f(X_k) - a_{k-1}(f)| / sqrt(n) decays from n/100 to n";
    out.push_back(std::move(r));
  }
  return out;
}

Reports stable_suite(std::uint64_t seed, Execution exec) {
  Reports out;
  const std::size_t n = 10000, R = 2000;
  const auto with_unconditional = [&](ExperimentConfig c,
                                      const std::function<VerificationReport(const ExperimentConfig&)>& plain,
                                      const std::function<bool(const PathSample&)>& event,
                                      const std::string& event_name,
                                      std::string description) {
    const auto unconditional = plain(c);
    c.tolerance.reset();
    auto r = stable_conditional_test(c, event, event_name);
    r.details["unconditional_statistic"] = unconditional.statistic;
    r.details["unconditional_pass"] = unconditional.pass;
    r.side_condition = unconditional.pass;
    r.description = std::move(description);
    r.decide();
    return r;
  };
  const auto x1_positive = [](const PathSample& p) { return p.x[0] > 0.0; };
  {
    auto c = base_config("stable_gaussian_w_given_x1_positive", 11, gaussian(0.5), n, R, seed, exec);
    c.statistic = {Centering::W, FunctionDescriptor::identity(), {}, false};
    c.limit = limit::Normal{1.0};
    c.tolerance = 0.045;
    out.push_back(with_unconditional(c, clt_experiment, x1_positive, "X_1 > 0",
                                     "W_n / sqrt(2u) given X_1 > 0 against the standard normal"));
  }
  {
    auto c = base_config("stable_gaussian_c_given_x1_positive", 11, gaussian(0.5), n, R, seed, exec);
    c.statistic = {Centering::C, FunctionDescriptor::identity(), {}, false};
    c.limit = limit::Normal{0.5};
    c.tolerance = 0.045;
    out.push_back(with_unconditional(c, clt_experiment, x1_positive, "X_1 > 0",
                                     "C_n / sqrt(u) given X_1 > 0 against the standard normal"));
  }
  {
    auto c = base_config("stable_urn_c_given_x1_one", 11, urn_iid_12(), n, R, seed, exec);
    c.tolerance = 0.045;
    // Same standardization as the unconditional urn test.
    const double delta = reinforcement_dispersion(urn_iid_12());
    ExperimentConfig cond = c;
    cond.statistic = {Centering::C, FunctionDescriptor::identity(), {}, false};
    cond.limit = limit::PathNormal{[delta](const PathSample& p) {
      const double v = p.predictive_mean.back();
      return delta * v * (1.0 - v);
    }};
    out.push_back(with_unconditional(
        cond, [](const ExperimentConfig& x) { return polya_clt_experiment(x); },
        [](const PathSample& p) { return p.x[0] == 1.0; }, "X_1 = 1",
        "C_n / sqrt(delta V(1 - V)) given X_1 = 1 against the standard normal"));
  }
  {
    auto c = base_config("stable_iid_b_given_x1_nonpositive", 11, iid_normal(), n, R, seed, exec);
    c.statistic = {Centering::B, FunctionDescriptor::identity(), {}, false};
    c.limit = limit::Normal{1.0};
    out.push_back(with_unconditional(c, clt_experiment,
                                     [](const PathSample& p) { return p.x[0] <= 0.0; }, "X_1 <= 0",
                                     "i.i.d. normal B_n given X_1 <= 0 against the standard normal"));
  }
  return out;
}

Reports diagnostics_suite(std::uint64_t seed, Execution exec) {
  Reports out;
  {
    auto c = base_config("oscillation_iid_uniform", 0, iid_uniform(), 10000, 200, seed, exec);
    c.statistic = {Centering::W, std::nullopt, linspace(0.0, 1.0, 512), false};
    auto r = oscillation_diagnostic(c, {32, 128}, [](double p) { return p; });
    r.description = "mean oscillation of the W process over 32 and 128 equiprobable cells";
    out.push_back(std::move(r));
  }
  for (const auto& [id, spec] : std::vector<std::pair<std::string, ProcessSpec>>{
           {"m_stat_beta_bernoulli", beta_bernoulli()},
           {"m_stat_iid_normal", iid_normal()},
           {"m_stat_gaussian", gaussian(0.5)}}) {
    auto c = base_config(id, 0, spec, 10000, 200, seed, exec);
    auto r = m_stat_trajectory(c);
    r.description = "M_n at n/100, n/10 and n (exploratory)";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view id) {
  // FNV-1a over the id, then a splitmix64 finalizer.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : id) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"oracle",    "gaussian",   "urn_clt", "slln",
                                              "empirical", "predictive", "stable",  "diagnostics"};
  return names;
}

std::vector<VerificationReport> run_suite(std::string_view name, std::uint64_t seed, Execution exec) {
  if (name == "all") {
    Reports all;
    for (const auto& s : suite_names()) {
      auto part = run_suite(s, seed, exec);
      std::move(part.begin(), part.end(), std::back_inserter(all));
    }
    return all;
  }
  Reports out;
  if (name == "oracle") out = oracle_suite(seed, exec);
  else if (name == "gaussian") out = gaussian_suite(seed, exec);
  else if (name == "urn_clt") out = urn_clt_suite(seed, exec);
  else if (name == "slln") out = slln_suite(seed, exec);
  else if (name == "empirical") out = empirical_suite(seed, exec);
  else if (name == "predictive") out = predictive_suite(seed, exec);
  else if (name == "stable") out = stable_suite(seed, exec);
  else if (name == "diagnostics") out = diagnostics_suite(seed, exec);
  else throw ParameterError("unknown suite '" + std::string(name) + "'");
  for (auto& r : out) r.details["suite"] = std::string(name);
  return out;
}

}  // namespace cidlab
