#include "acee/scm/bench_models.hpp"

#include <cmath>
#include <stdexcept>

namespace acee::scm {

namespace {

Mechanism source_normal(double sd = 1.0, double mean = 0.0) {
  Mechanism m;
  if (mean != 0.0) m.terms.push_back(Term::constant(mean));
  m.noise.kind = NoiseSpec::Kind::Additive;
  m.noise.scale = sd;
  return m;
}

Mechanism additive(std::vector<Term> terms, double sd) {
  Mechanism m;
  m.terms = std::move(terms);
  m.noise.kind = NoiseSpec::Kind::Additive;
  m.noise.scale = sd;
  return m;
}

Mechanism bernoulli(std::vector<Term> prob_terms) {
  Mechanism m;
  m.terms = std::move(prob_terms);
  m.noise.kind = NoiseSpec::Kind::BernoulliU;
  return m;
}

// P(D=1|X1,X2) = 0.1 + 0.8 / (1 + exp(X1*X2)), slots (0,1) = (X1,X2)
Mechanism m123_propensity() {
  return bernoulli({Term::constant(0.1), Term::logistic(0.8, {Term::prod2(0, 1, 1.0)})});
}

void add_covariates(Scm& scm, int count) {
  for (int i = 1; i <= count; ++i) {
    scm.dag.add_node("X" + std::to_string(i));
    scm.mechanisms.push_back(source_normal());
  }
}

Scm make_m1() {
  Scm scm;
  add_covariates(scm, 5);
  const int d = scm.dag.add_node("D");
  scm.dag.add_edge("X1", "D");
  scm.dag.add_edge("X2", "D");
  scm.mechanisms.push_back(m123_propensity());
  const int y = scm.dag.add_node("Y");
  for (const char* p : {"X1", "X2", "X3", "X4", "X5", "D"}) scm.dag.add_edge(p, "Y");
  // Y = X1^2 + X1 X2 + exp(X3 + D) + sin(X4 X5) + eps
  scm.mechanisms.push_back(additive({Term::quad(0, 1.0), Term::prod2(0, 1, 1.0),
                                     Term::exp_lin({2, 5}, {1.0, 1.0}), Term::sin_prod2(3, 4, 1.0)},
                                    1.0));
  scm.treatment = d;
  scm.outcome = y;
  return scm;
}

Scm make_m2() {
  Scm scm;
  add_covariates(scm, 5);
  const int d = scm.dag.add_node("D");
  scm.dag.add_edge("X1", "D");
  scm.dag.add_edge("X2", "D");
  scm.mechanisms.push_back(m123_propensity());
  const int y = scm.dag.add_node("Y");
  for (const char* p : {"X1", "X3", "X4", "X5", "D"}) scm.dag.add_edge(p, "Y");
  // Y = X1^2 + exp(X3 + D) + sin(X4 X5) + (10 D + X5^2 / 2) eps
  Mechanism m;
  m.terms = {Term::quad(0, 1.0), Term::exp_lin({1, 4}, {1.0, 1.0}), Term::sin_prod2(2, 3, 1.0)};
  m.noise.kind = NoiseSpec::Kind::Additive;
  m.noise.scale_terms = {Term::lin(4, 10.0), Term::quad(3, 0.5)};
  scm.mechanisms.push_back(std::move(m));
  scm.treatment = d;
  scm.outcome = y;
  return scm;
}

Scm make_m3() {
  Scm scm;
  add_covariates(scm, 5);
  const int d = scm.dag.add_node("D");
  scm.dag.add_edge("X1", "D");
  scm.dag.add_edge("X2", "D");
  scm.mechanisms.push_back(m123_propensity());
  const int y = scm.dag.add_node("Y");
  for (const char* p : {"X1", "X2", "X3", "D"}) scm.dag.add_edge(p, "Y");
  // Y = (X1^2 + sin(X2 X3) + D) * exp(eps)
  Mechanism m;
  m.terms = {Term::quad(0, 1.0), Term::sin_prod2(1, 2, 1.0), Term::lin(3, 1.0)};
  m.noise.kind = NoiseSpec::Kind::MultExp;
  m.noise.scale = 1.0;
  scm.mechanisms.push_back(std::move(m));
  scm.treatment = d;
  scm.outcome = y;
  return scm;
}

Scm make_m4() {
  Scm scm;
  scm.dag.add_node("U", true);
  scm.mechanisms.push_back(source_normal());
  // X1 = 1.5 U + e1, X2 = U + e2, X3 = U + e3; X4, X5 independent
  for (int i = 1; i <= 3; ++i) {
    scm.dag.add_node("X" + std::to_string(i));
    scm.dag.add_edge("U", "X" + std::to_string(i));
    scm.mechanisms.push_back(additive({Term::lin(0, i == 1 ? 1.5 : 1.0)}, 1.0));
  }
  scm.dag.add_node("X4");
  scm.mechanisms.push_back(source_normal());
  scm.dag.add_node("X5");
  scm.mechanisms.push_back(source_normal());
  const int d = scm.dag.add_node("D");
  scm.dag.add_edge("U", "D");
  // P(D=1|U) = 0.1 + 0.8 / (1 + exp(-U))
  scm.mechanisms.push_back(
      bernoulli({Term::constant(0.1), Term::logistic(0.8, {Term::lin(0, -1.0)})}));
  const int y = scm.dag.add_node("Y");
  for (const char* p : {"X1", "X4", "X5", "D", "U"}) scm.dag.add_edge(p, "Y");
  // Y = X1^2 + D X1 + sin(X4 X5) + U^2 + eps
  scm.mechanisms.push_back(additive({Term::quad(0, 1.0), Term::prod2(3, 0, 1.0),
                                     Term::sin_prod2(1, 2, 1.0), Term::quad(4, 1.0)},
                                    1.0));
  scm.treatment = d;
  scm.outcome = y;
  return scm;
}

Scm make_example1() {
  Scm scm;
  scm.dag.add_node("H", true);
  scm.mechanisms.push_back(source_normal());
  scm.dag.add_node("X1");
  scm.dag.add_edge("H", "X1");
  scm.mechanisms.push_back(additive({Term::lin(0, 1.6)}, 1.0));
  scm.dag.add_node("X2");
  scm.dag.add_edge("X1", "X2");
  scm.dag.add_edge("H", "X2");
  scm.mechanisms.push_back(additive({Term::lin(0, 0.2), Term::lin(1, -1.4)}, 1.0));
  scm.dag.add_node("X3");
  scm.dag.add_edge("X1", "X3");
  scm.dag.add_edge("X2", "X3");
  scm.dag.add_edge("H", "X3");
  scm.mechanisms.push_back(
      additive({Term::lin(0, 0.1), Term::lin(1, -0.1), Term::lin(2, 1.3)}, 1.0));
  scm.dag.add_node("X4");
  scm.dag.add_edge("X3", "X4");
  scm.dag.add_edge("H", "X4");
  scm.mechanisms.push_back(additive({Term::lin(0, 0.2), Term::lin(1, 1.1)}, 1.0));

  const int d = scm.dag.add_node("D");
  scm.dag.add_edge("X1", "D");
  scm.dag.add_edge("H", "D");
  // P(D=1|X,H) = sigmoid(-0.5 X1) * sigmoid(-2.5 H)
  Mechanism dm;
  dm.terms = {Term::log_sigmoid({Term::lin(0, 0.5)}), Term::log_sigmoid({Term::lin(1, 2.5)})};
  dm.noise.kind = NoiseSpec::Kind::BernoulliExpU;
  scm.mechanisms.push_back(std::move(dm));

  const int y = scm.dag.add_node("Y");
  for (const char* p : {"X1", "X2", "X3", "X4", "D", "H"}) scm.dag.add_edge(p, "Y");
  // Y = X1 - 0.5 X2 + 0.25 X3 + 0.3 X4 + 2 D + 1.8 H + eps; the ITE is 2
  scm.mechanisms.push_back(additive({Term::lin(0, 1.0), Term::lin(1, -0.5), Term::lin(2, 0.25),
                                     Term::lin(3, 0.3), Term::lin(4, 2.0), Term::lin(5, 1.8)},
                                    1.0));
  scm.treatment = d;
  scm.outcome = y;
  return scm;
}

Scm make_nonlin_simpson(bool shifted) {
  Scm scm;
  scm.dag.add_node("X1");
  scm.dag.add_node("X2");
  scm.dag.add_node("X3");
  scm.dag.add_node("X4");
  scm.dag.add_edge("X3", "X1");
  scm.dag.add_edge("X3", "X2");
  scm.dag.add_edge("X1", "X2");
  scm.dag.add_edge("X2", "X4");
  scm.mechanisms.resize(4);
  const int x1 = 0, x2 = 1, x3 = 2, x4 = 3;
  if (!shifted) {
    scm.mechanisms[x3] = source_normal();
    scm.mechanisms[x1] = additive({Term::tanh_of(0, 1.0, 1.5)}, 0.3);
    // marginally cov(X1, X2) > 0 through X3, conditionally negative via -tanh(X1)
    scm.mechanisms[x2] = additive({Term::tanh_of(1, -2.0, 1.2), Term::tanh_of(0, 2.5, 1.2)}, 0.3);
    scm.mechanisms[x4] = additive({Term::tanh_of(0, 2.0, 1.0), Term::quad(0, 0.2)}, 0.5);
  } else {
    scm.mechanisms[x3] = source_normal(1.1, 0.3);
    scm.mechanisms[x1] = additive({Term::tanh_of(0, 1.2, 1.2)}, 0.35);
    scm.mechanisms[x2] = additive({Term::tanh_of(1, -1.6, 1.1), Term::tanh_of(0, 2.2, 1.0)}, 0.4);
    scm.mechanisms[x4] = additive({Term::tanh_of(0, 2.4, 0.9), Term::quad(0, 0.15)}, 0.5);
  }
  return scm;
}

Scm make_symprod_simpson(bool shifted) {
  Scm scm;
  scm.dag.add_node("X1");
  scm.dag.add_node("X2");
  scm.dag.add_node("X3");
  scm.dag.add_node("X4");
  scm.dag.add_edge("X3", "X1");
  scm.dag.add_edge("X3", "X2");
  scm.dag.add_edge("X3", "X4");
  scm.dag.add_edge("X1", "X2");
  scm.mechanisms.resize(4);
  const int x1 = 0, x2 = 1, x3 = 2, x4 = 3;
  if (!shifted) {
    scm.mechanisms[x3] = source_normal();
    scm.mechanisms[x1] = additive({Term::tanh_of(0, 1.3, 1.0)}, 0.4);
    scm.mechanisms[x2] = additive({Term::prod2(0, 1, 1.2)}, 0.3);  // X3 * X1 product
    scm.mechanisms[x4] = additive({Term::tanh_of(0, 1.5, 1.0), Term::quad(0, 0.3)}, 0.5);
  } else {
    scm.mechanisms[x3] = source_normal(1.2, -0.2);
    scm.mechanisms[x1] = additive({Term::tanh_of(0, 1.1, 1.2)}, 0.45);
    scm.mechanisms[x2] = additive({Term::prod2(0, 1, 1.0)}, 0.35);
    scm.mechanisms[x4] = additive({Term::tanh_of(0, 1.8, 0.9), Term::quad(0, 0.25)}, 0.5);
  }
  return scm;
}

Scm make_chain_graph(bool weak_arrows) {
  Scm scm;
  for (int i = 1; i <= 9; ++i) scm.dag.add_node("X" + std::to_string(i));
  scm.mechanisms.resize(9);
  auto chain = [&](const char* p, const char* c) {
    scm.dag.add_edge(p, c);
    scm.mechanisms[scm.dag.index_of(c)] = additive({Term::tanh_of(0, 1.4, 1.0)}, 0.3);
  };
  scm.mechanisms[0] = source_normal();
  chain("X1", "X2");
  chain("X1", "X3");
  chain("X2", "X4");
  chain("X3", "X5");
  chain("X4", "X6");
  chain("X6", "X8");
  chain("X5", "X7");
  scm.dag.add_edge("X8", "X9");
  scm.dag.add_edge("X7", "X9");
  std::vector<Term> y_terms = {Term::tanh_of(0, 1.3, 1.0), Term::tanh_of(1, 1.3, 1.0)};
  if (weak_arrows) {
    int slot = 2;
    for (const char* p : {"X1", "X2", "X3", "X4", "X5", "X6"}) {
      scm.dag.add_edge(p, "X9");
      y_terms.push_back(Term::tanh_of(slot++, 0.3, 1.0));
    }
  }
  scm.mechanisms[8] = additive(std::move(y_terms), 0.3);
  return scm;
}

Scm make_linear(const numerics::Matrix& v) {
  if (v.rows() != v.cols() || v.rows() < 2)
    throw std::invalid_argument("LinearV: V must be square, p >= 2");
  for (Eigen::Index k = 0; k < v.rows(); ++k)
    for (Eigen::Index j = 0; j <= k; ++j)
      if (v(k, j) != 0.0)
        throw std::invalid_argument("LinearV: V must be strictly upper triangular");
  Scm scm;
  const int p = static_cast<int>(v.rows());
  for (int j = 1; j <= p; ++j) scm.dag.add_node("X" + std::to_string(j));
  for (int j = 0; j < p; ++j) {
    std::vector<Term> terms;
    int slot = 0;
    for (int k = 0; k < j; ++k)
      if (v(k, j) != 0.0) {
        scm.dag.add_edge(k, j);
        terms.push_back(Term::lin(slot++, v(k, j)));
      }
    scm.mechanisms.push_back(additive(std::move(terms), 1.0));
  }
  return scm;
}

}  // namespace

Scm bench_model(const BenchModel& model) {
  switch (model.kind) {
    case BenchModelKind::M1:
      return make_m1();
    case BenchModelKind::M2:
      return make_m2();
    case BenchModelKind::M3:
      return make_m3();
    case BenchModelKind::M4:
      return make_m4();
    case BenchModelKind::NonlinSimpson:
      return make_nonlin_simpson(false);
    case BenchModelKind::SymprodSimpson:
      return make_symprod_simpson(false);
    case BenchModelKind::LargeBackdoor:
      return make_chain_graph(false);
    case BenchModelKind::WeakArrows:
      return make_chain_graph(true);
    case BenchModelKind::Example1:
      return make_example1();
    case BenchModelKind::LinearV:
      return make_linear(model.v);
  }
  throw std::logic_error("unreachable bench model kind");
}

std::optional<double> true_ate(BenchModelKind kind) {
  switch (kind) {
    case BenchModelKind::M1:
    case BenchModelKind::M2:
      // E[exp(X3 + 1) - exp(X3)] = (e - 1) e^{1/2}
      return std::exp(1.5) - std::exp(0.5);
    case BenchModelKind::M3:
      return std::exp(0.5);  // E[exp(eps)]
    case BenchModelKind::M4:
      return 0.0;  // E[X1] = 0
    case BenchModelKind::Example1:
      return 2.0;
    default:
      return std::nullopt;
  }
}

InterventionQuery default_query(const Scm& scm, BenchModelKind kind) {
  InterventionQuery q;
  q.x1 = 1.0;
  q.x0 = 0.0;
  switch (kind) {
    case BenchModelKind::NonlinSimpson:
      q.source = scm.dag.index_of("X1");
      q.target = scm.dag.index_of("X4");
      return q;
    case BenchModelKind::SymprodSimpson:
      q.source = scm.dag.index_of("X3");
      q.target = scm.dag.index_of("X4");
      return q;
    case BenchModelKind::LargeBackdoor:
    case BenchModelKind::WeakArrows:
      q.source = scm.dag.index_of("X8");
      q.target = scm.dag.index_of("X9");
      return q;
    default:
      if (scm.treatment >= 0 && scm.outcome >= 0) {
        q.source = scm.treatment;
        q.target = scm.outcome;
        return q;
      }
      throw std::invalid_argument("default_query: model has no conventional query");
  }
}

Scm shifted_variant(BenchModelKind kind) {
  switch (kind) {
    case BenchModelKind::NonlinSimpson:
      return make_nonlin_simpson(true);
    case BenchModelKind::SymprodSimpson:
      return make_symprod_simpson(true);
    default:
      throw std::invalid_argument("shifted_variant: only defined for the CSuite-style graphs");
  }
}

BenchModelKind bench_model_kind_from_string(const std::string& name) {
  if (name == "m1") return BenchModelKind::M1;
  if (name == "m2") return BenchModelKind::M2;
  if (name == "m3") return BenchModelKind::M3;
  if (name == "m4") return BenchModelKind::M4;
  if (name == "nonlin_simpson") return BenchModelKind::NonlinSimpson;
  if (name == "symprod_simpson") return BenchModelKind::SymprodSimpson;
  if (name == "large_backdoor") return BenchModelKind::LargeBackdoor;
  if (name == "weak_arrows") return BenchModelKind::WeakArrows;
  if (name == "example1") return BenchModelKind::Example1;
  throw std::invalid_argument("unknown bench model: " + name);
}

std::string to_string(BenchModelKind kind) {
  switch (kind) {
    case BenchModelKind::M1:
      return "m1";
    case BenchModelKind::M2:
      return "m2";
    case BenchModelKind::M3:
      return "m3";
    case BenchModelKind::M4:
      return "m4";
    case BenchModelKind::NonlinSimpson:
      return "nonlin_simpson";
    case BenchModelKind::SymprodSimpson:
      return "symprod_simpson";
    case BenchModelKind::LargeBackdoor:
      return "large_backdoor";
    case BenchModelKind::WeakArrows:
      return "weak_arrows";
    case BenchModelKind::Example1:
      return "example1";
    case BenchModelKind::LinearV:
      return "linear_v";
  }
  return "unknown";
}

}  // namespace acee::scm
