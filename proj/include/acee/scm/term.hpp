#pragma once

#include <span>
#include <vector>

namespace acee::scm {

// One additive term of a structural mechanism. A mechanism value is the sum
// of its terms evaluated on the node's parent values (slot indices refer to
// positions in the declared parent list). The small vocabulary below covers
// every generator shipped here and is what the JSON model files speak.
struct Term {
  enum class Kind {
    Const,      // c
    Lin,        // c * x_i
    Quad,       // c * x_i^2
    Prod2,      // c * x_i * x_j
    ExpLin,     // c * exp(sum coef_l * x_{idx_l})
    SinProd2,   // c * sin(x_i * x_j)
    Tanh,       // c * tanh(scale * x_i)
    Logistic,   // c / (1 + exp(sum inner))
    LogSigmoid  // c * log(1 / (1 + exp(sum inner)))
  };

  Kind kind = Kind::Const;
  double c = 0.0;
  int i = -1;
  int j = -1;
  double scale = 1.0;
  std::vector<int> idx;
  std::vector<double> coef;
  std::vector<Term> inner;

  double eval(std::span<const double> parents) const;

  static Term constant(double v);
  static Term lin(int slot, double c);
  static Term quad(int slot, double c);
  static Term prod2(int a, int b, double c);
  static Term exp_lin(std::vector<int> slots, std::vector<double> coef, double c = 1.0);
  static Term sin_prod2(int a, int b, double c);
  static Term tanh_of(int slot, double gain, double scale);
  static Term logistic(double span, std::vector<Term> exponent);
  static Term log_sigmoid(std::vector<Term> exponent);
};

double eval_terms(const std::vector<Term>& terms, std::span<const double> parents);

// Highest parent slot referenced by a term list, -1 when none.
int max_slot(const std::vector<Term>& terms);

struct NoiseSpec {
  enum class Kind {
    Additive,      // value + scale * eps,     eps ~ N(0,1)
    MultExp,       // value * exp(scale*eps),  eps ~ N(0,1)
    MultRaw,       // value * scale * eps,     eps ~ N(0,1)
    BernoulliU,    // 1{u < clamp(value)},     u ~ U[0,1)
    BernoulliExpU  // 1{u < clamp(exp(value))}
  };

  Kind kind = Kind::Additive;
  double scale = 1.0;
  std::vector<Term> scale_terms;  // when non-empty, scale = eval on parents

  bool uses_uniform() const {
    return kind == Kind::BernoulliU || kind == Kind::BernoulliExpU;
  }
};

// Structural mechanism of one node: deterministic part plus noise hook-up.
struct Mechanism {
  std::vector<Term> terms;
  NoiseSpec noise;

  double eval(std::span<const double> parents, double noise_draw) const;
  int max_slot() const;
};

}  // namespace acee::scm
