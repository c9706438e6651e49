#include "dpg/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpg/errors.hpp"

namespace dpg {

namespace {

// sup_t beta^t (t+w)^{2p} via a terminating scan: the term ratio
// beta ((t+1+w)/(t+w))^{2p} is decreasing in t, so once it drops below 1
// every later term is smaller than the running max.
double sup_geometric_poly(double beta, double w, double two_p,
                          long cap = 100000000) {
  if (beta <= 0.0) return std::pow(w, two_p);
  double max_term = std::pow(w, two_p);
  double term = max_term;
  for (long t = 0; t < cap; ++t) {
    const double ratio =
        beta * std::pow((static_cast<double>(t) + 1.0 + w) /
                            (static_cast<double>(t) + w),
                        two_p);
    if (ratio < 1.0) return max_term;
    term *= ratio;
    max_term = std::max(max_term, term);
  }
  throw NoConvergence("constant scan did not terminate");
}

double rho_sup(double beta, const StepSchedule& schedule) {
  if (schedule.is_constant()) {
    const double a = schedule.alpha(0);
    return 1.0 / (a * a);  // beta^t peaks at t = 0
  }
  const auto& s = std::get<PolynomialStep>(schedule.v);
  return sup_geometric_poly(beta, s.w, 2.0 * s.p) / (s.v * s.v);
}

// sup_s (alpha(0)^2 beta^s + alpha([s/2])^2) / alpha(s)^2 for a
// polynomial schedule.  The first summand follows the same scan as rho;
// the second increases toward its tail limit 2^{2p} (w >= 1), which is
// folded into the result so the scan can stop once the geometric part
// is negligible.
double decreasing_j_sup(double beta, const PolynomialStep& s,
                        long cap = 100000000) {
  const double two_p = 2.0 * s.p;
  const double alpha0_sq = std::pow(s.v / std::pow(s.w, s.p), 2.0);
  auto term = [&](long t) {
    const double at_sq =
        std::pow(s.v / std::pow(static_cast<double>(t) + s.w, s.p), 2.0);
    const double ahalf_sq = std::pow(
        s.v / std::pow(static_cast<double>(t / 2) + s.w, s.p), 2.0);
    return (alpha0_sq * std::pow(beta, static_cast<double>(t)) + ahalf_sq) /
           at_sq;
  };
  double max_term = term(0);
  const double tail_limit = std::pow(2.0, two_p);
  for (long t = 1; t < cap; ++t) {
    const double geo = alpha0_sq * std::pow(beta, static_cast<double>(t)) *
                       std::pow(static_cast<double>(t) + s.w, two_p) /
                       (s.v * s.v);
    max_term = std::max(max_term, term(t));
    if (geo < 1e-14 * std::max(1.0, max_term))
      return std::max(max_term, tail_limit);
  }
  throw NoConvergence("J scan did not terminate");
}

}  // namespace

TheoryConstants compute_constants(double L, double mu, std::size_t n, double D,
                                  double beta, const StepSchedule& schedule,
                                  double R, std::optional<double> delta_choice,
                                  ConstantVariant variant) {
  if (!(L >= mu && mu > 0.0)) throw Error("constants: need L >= mu > 0");
  if (!(beta >= 0.0 && beta < 1.0)) throw Error("constants: need beta in [0,1)");
  if (D < 0.0) throw Error("constants: need D >= 0");
  if (!(R > 0.0)) throw Error("constants: need R > 0");

  TheoryConstants k;
  k.L = L;
  k.mu = mu;
  k.n = n;
  k.D = D;
  k.beta = beta;
  k.R = R;
  k.schedule = schedule;
  k.variant = variant;

  double young;  // the (1 + 1/delta) factor
  if (delta_choice) {
    k.delta = *delta_choice;
    if (!(k.delta > 0.0)) throw Error("constants: delta must be positive");
    k.beta_tilde = (1.0 + k.delta) * beta * beta;
    if (k.beta_tilde >= 1.0)
      throw BetaTildeNotContractive("constants: (1+delta) beta^2 >= 1");
    young = 1.0 + 1.0 / k.delta;
  } else {
    // delta = (1-beta)/beta gives beta_tilde = beta and 1+1/delta = 1/(1-beta)
    k.delta = beta > 0.0 ? (1.0 - beta) / beta
                         : std::numeric_limits<double>::infinity();
    k.beta_tilde = beta;
    young = 1.0 / (1.0 - beta);
  }

  const double nd = static_cast<double>(n);
  k.c1 = 3.0 * L * L * young;
  k.c2 = 3.0 * nd * D * D * young;
  k.c3 = k.c1 + L * L;
  k.c4 = 4.0 * L * L / mu;

  k.tc1 = 3.0 * L * L / (1.0 - beta);
  k.tc2 = 3.0 * nd * D * D / (1.0 - beta);
  k.tc3 = k.tc1 + L * L;
  k.tc4 = 4.0 * L * L / mu;

  const double half = k.c4 + mu / 4.0;
  k.Z = (-half + std::sqrt(half * half + 4.0 * k.c3 * (1.0 - k.beta_tilde))) /
        (2.0 * k.c3);

  const double base_j = variant == ConstantVariant::Theorem
                            ? 3.0 * (L * L * R * R + nd * D * D)
                            : 3.0 * (L * L * R + nd * D * D);
  if (schedule.is_constant()) {
    k.J = base_j;
    k.Q = 1.0;
  } else {
    const auto& s = std::get<PolynomialStep>(schedule.v);
    k.J = base_j * decreasing_j_sup(beta, s);
    k.Q = std::pow((s.w + 1.0) / s.w, 2.0 * s.p);
  }
  k.rho = rho_sup(beta, schedule);

  const double a0 = schedule.alpha(0);
  const double poly = k.tc3 * a0 * a0 + k.tc4 * a0 + beta;
  k.G1 = variant == ConstantVariant::Theorem ? 2.0 * R * poly : poly * R;
  const double omb2 = (1.0 - beta) * (1.0 - beta);
  const double jterm = variant == ConstantVariant::Theorem
                           ? 2.0 * k.J * k.J / omb2
                           : k.J / omb2;
  k.G2 = poly * jterm + k.tc1 * R + k.tc2;

  return k;
}

double uniform_bound(double c2, double alpha0, double mu, double C0) {
  return std::max(4.0 * c2 * alpha0 / mu, C0);
}

double max_constant_stepsize(BoundednessCase which, const TheoryConstants& k,
                             double L, double mu, double lambda_min) {
  switch (which) {
    case BoundednessCase::BoundedSet:
      // any alpha keeps the set bounded; only alpha(0) <= 2/(L+mu) is
      // needed by the downstream theorems
      return std::numeric_limits<double>::infinity();
    case BoundednessCase::ConvexCosts:
      return (1.0 + lambda_min) / L;
    case BoundednessCase::StronglyConvex:
      return std::min({k.Z, mu / (4.0 * k.c1), 2.0 / (L + mu)});
  }
  throw UnsupportedCase("max_constant_stepsize: unknown case");
}

namespace {

CheckResult make_check(const char* name, long t, double lhs, double rhs,
                       double tol) {
  CheckResult r;
  r.name = name;
  r.t = t;
  r.lhs = lhs;
  r.rhs = rhs;
  r.pass = lhs <= rhs + tol;
  return r;
}

}  // namespace

CheckResult check_prop_4_1(const IterateRecord& rec_t,
                           const IterateRecord& rec_t1,
                           const TheoryConstants& k, double alpha_t,
                           double tol) {
  const double a2 = alpha_t * alpha_t;
  const double rhs = (k.c1 * a2 + k.beta_tilde) * rec_t.A +
                     k.c1 * a2 * rec_t.B + k.c2 * a2;
  return make_check("prop_4_1", rec_t.t, rec_t1.A, rhs, tol);
}

CheckResult check_prop_4_2(const IterateRecord& rec_t,
                           const IterateRecord& rec_t1,
                           const TheoryConstants& k, double alpha_t,
                           double tol) {
  const double a2 = alpha_t * alpha_t;
  const double rhs = (k.c3 * a2 + k.c4 * alpha_t + k.beta_tilde) * rec_t.A +
                     (1.0 - 0.5 * k.mu * alpha_t + k.c1 * a2) * rec_t.B +
                     k.c2 * a2;
  return make_check("prop_4_2", rec_t.t, rec_t1.C, rhs, tol);
}

CheckResult check_lemma_5_2(const IterateRecord& rec_t,
                            const IterateRecord& rec_t1,
                            const TheoryConstants& k, double alpha_t,
                            double tol) {
  const double rhs =
      (1.0 - 0.25 * k.mu * alpha_t) * rec_t.C + k.c2 * alpha_t * alpha_t;
  return make_check("lemma_5_2", rec_t.t, rec_t1.C, rhs, tol);
}

double bound_consensus(long t, double A0, const TheoryConstants& k) {
  const double a = k.schedule.alpha(t);
  return std::pow(k.beta, static_cast<double>(t)) * A0 +
         k.J * a * a / ((1.0 - k.beta) * (1.0 - k.beta));
}

MainBoundEvaluator::MainBoundEvaluator(const TheoryConstants& k, double B0)
    : k_(k), B0_(B0) {
  if (!k_.schedule.is_constant()) {
    const auto& s = std::get<PolynomialStep>(k_.schedule.v);
    if (s.p == 1.0 && k_.mu * s.v / 2.0 <= 1.0)
      throw InadmissibleSchedule("theorem for p=1 needs mu v / 2 > 1");
    sum_inv_p_.push_back(0.0);
    sum_inv_2p_.assign(2, 0.0);  // the 2p-series starts at s = 1
  }
}

void MainBoundEvaluator::grow(long t) {
  const auto& s = std::get<PolynomialStep>(k_.schedule.v);
  while (static_cast<long>(sum_inv_p_.size()) <= t) {
    const double sidx = static_cast<double>(sum_inv_p_.size()) - 1.0;
    sum_inv_p_.push_back(sum_inv_p_.back() +
                         1.0 / std::pow(sidx + s.w, s.p));
  }
  while (static_cast<long>(sum_inv_2p_.size()) <= t) {
    const double sidx = static_cast<double>(sum_inv_2p_.size()) - 1.0;
    sum_inv_2p_.push_back(sum_inv_2p_.back() +
                          1.0 / std::pow(sidx + s.w, 2.0 * s.p));
  }
}

double MainBoundEvaluator::value(long t) {
  const double td = static_cast<double>(t);
  if (k_.schedule.is_constant()) {
    const double a = k_.schedule.alpha(0);
    const double gamma = 1.0 - 0.5 * k_.mu * a;
    return std::pow(gamma, td) * B0_ + 2.0 * k_.G2 * a / k_.mu +
           (2.0 / (k_.mu * a)) *
               (std::pow(gamma, td - 1.0) +
                std::pow(k_.beta, (td - 1.0) / 2.0));
  }

  const auto& s = std::get<PolynomialStep>(k_.schedule.v);
  const double gsum = k_.rho * k_.G1 + k_.G2;
  grow(t);

  if (s.p < 1.0) {
    const double coeff = k_.variant == ConstantVariant::Theorem
                             ? 2.0 * M_E * k_.Q * gsum * s.v / k_.mu
                             : 4.0 * k_.Q * gsum * s.v / k_.mu;
    const double lead =
        coeff * std::pow(static_cast<double>(t / 2) + s.w - 1.0, -s.p);
    const double r1 =
        std::exp(-0.5 * k_.mu * s.v * sum_inv_p_[static_cast<std::size_t>(t)]) *
        B0_;
    const double tail =
        t / 2 >= 1 ? sum_inv_2p_[static_cast<std::size_t>(t / 2)] : 0.0;
    const double r2 = k_.Q * gsum * s.v * s.v *
                      std::exp(-k_.mu * s.v * td /
                               (4.0 * std::pow(td + s.w, s.p))) *
                      tail;
    return lead + r1 + r2;
  }

  // p = 1 (needs mu v / 2 > 1, enforced at construction)
  const double c1 = k_.mu * s.v / 2.0;
  const double q = std::pow((s.w + 1.0) / s.w, 2.0);
  const double r3 = q / (c1 - 1.0) * std::pow((s.w + 1.0) / s.w, c1) * gsum *
                    s.v * s.v / (td + s.w - 1.0);
  return std::pow(s.w / (td + s.w), c1) * B0_ + r3;
}

double bound_main(long t, double B0, const TheoryConstants& k) {
  MainBoundEvaluator ev(k, B0);
  return ev.value(t);
}

RecursionCheck check_lemma_7_1(double C1, double C2, double p, double q,
                               double w, double H0, long T, double tol) {
  if (!(p > 0.0 && p <= 1.0)) throw PreconditionViolated("lemma 7.1: p");
  if (!(q > 0.0)) throw PreconditionViolated("lemma 7.1: q");
  if (!(w >= 1.0)) throw PreconditionViolated("lemma 7.1: w");
  if (!(C1 > 0.0 && C1 / std::pow(w, p) < 1.0))
    throw PreconditionViolated("lemma 7.1: need 0 < C1/w^p < 1");
  if (C2 < 0.0 || H0 < 0.0) throw PreconditionViolated("lemma 7.1: sign");

  const double bigq = std::pow((w + 1.0) / w, p + q);

  RecursionCheck out;
  out.pass = true;
  out.min_slack = std::numeric_limits<double>::infinity();

  double h = H0;
  double sum_inv_p = 0.0;   // sum_{s=0}^{t-1} 1/(s+w)^p
  double sum_inv_pq = 0.0;  // sum_{s=1}^{[t/2]-1} 1/(s+w)^{p+q}
  long pq_upto = 0;         // next s to fold into sum_inv_pq

  for (long t = 1; t <= T; ++t) {
    const double base = static_cast<double>(t) + w - 1.0;
    h = (1.0 - C1 / std::pow(base, p)) * h + C2 / std::pow(base, p + q);
    sum_inv_p += 1.0 / std::pow(static_cast<double>(t) - 1.0 + w, p);
    while (pq_upto + 1 <= t / 2 - 1) {
      ++pq_upto;
      sum_inv_pq += 1.0 / std::pow(static_cast<double>(pq_upto) + w, p + q);
    }

    double bound;
    const double td = static_cast<double>(t);
    if (p < 1.0) {
      const double delta = bigq * C2 / C1 * std::exp(C1 / std::pow(w, p));
      const double head =
          delta * std::pow(static_cast<double>(t / 2) + w - 1.0, -q);
      const double r = std::exp(-C1 * sum_inv_p) * H0 +
                       (t <= 3 ? 0.0
                               : bigq * C2 *
                                     std::exp(-C1 * td /
                                              (2.0 * std::pow(td + w, p))) *
                                     sum_inv_pq);
      bound = head + r;
    } else {
      double r;
      if (q > C1) {
        r = std::pow(w, C1 - q) / (q - C1) * bigq * C2 /
            std::pow(td + w, C1);
      } else if (q == C1) {
        r = std::log((td + w) / w) * bigq * C2 / std::pow(td + w, C1);
      } else {
        r = 1.0 / (C1 - q) * std::pow((w + 1.0) / w, C1) * bigq * C2 /
            std::pow(td + w + 1.0, q);
      }
      bound = std::pow(w / (td + w), C1) * H0 + r;
    }

    const double slack = bound - h;
    if (slack < out.min_slack) out.min_slack = slack;
    if (h > bound + tol && out.pass) {
      out.pass = false;
      out.first_fail = t;
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const TheoryConstants& k) {
  j = {{"L", k.L},
       {"mu", k.mu},
       {"n", k.n},
       {"D", k.D},
       {"beta", k.beta},
       {"R", k.R},
       {"schedule", k.schedule},
       {"variant", k.variant == ConstantVariant::Theorem ? "theorem" : "proof"},
       {"delta", std::isfinite(k.delta) ? nlohmann::json(k.delta)
                                        : nlohmann::json("inf")},
       {"beta_tilde", k.beta_tilde},
       {"c1", k.c1},
       {"c2", k.c2},
       {"c3", k.c3},
       {"c4", k.c4},
       {"tilde_c1", k.tc1},
       {"tilde_c2", k.tc2},
       {"tilde_c3", k.tc3},
       {"tilde_c4", k.tc4},
       {"Z", k.Z},
       {"J", k.J},
       {"G1", k.G1},
       {"G2", k.G2},
       {"rho", k.rho},
       {"Q", k.Q}};
}

void to_json(nlohmann::json& j, const CheckResult& r) {
  j = {{"name", r.name}, {"t", r.t},       {"lhs", r.lhs},
       {"rhs", r.rhs},   {"pass", r.pass}, {"slack", r.slack()}};
}

}  // namespace dpg
