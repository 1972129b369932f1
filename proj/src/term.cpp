#include "acee/scm/term.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acee::scm {

namespace {

double checked(std::span<const double> parents, int slot) {
  if (slot < 0 || static_cast<std::size_t>(slot) >= parents.size())
    throw std::out_of_range("term references parent slot beyond arity");
  return parents[slot];
}

}  // namespace

double Term::eval(std::span<const double> parents) const {
  switch (kind) {
    case Kind::Const:
      return c;
    case Kind::Lin:
      return c * checked(parents, i);
    case Kind::Quad: {
      const double x = checked(parents, i);
      return c * x * x;
    }
    case Kind::Prod2:
      return c * checked(parents, i) * checked(parents, j);
    case Kind::ExpLin: {
      double s = 0.0;
      for (std::size_t l = 0; l < idx.size(); ++l) s += coef[l] * checked(parents, idx[l]);
      return c * std::exp(s);
    }
    case Kind::SinProd2:
      return c * std::sin(checked(parents, i) * checked(parents, j));
    case Kind::Tanh:
      return c * std::tanh(scale * checked(parents, i));
    case Kind::Logistic:
      return c / (1.0 + std::exp(eval_terms(inner, parents)));
    case Kind::LogSigmoid: {
      // c * log sigmoid(-s) = -c * softplus(s), computed stably
      const double s = eval_terms(inner, parents);
      const double softplus = s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
      return -c * softplus;
    }
  }
  throw std::logic_error("unreachable term kind");
}

double eval_terms(const std::vector<Term>& terms, std::span<const double> parents) {
  double s = 0.0;
  for (const Term& t : terms) s += t.eval(parents);
  return s;
}

int max_slot(const std::vector<Term>& terms) {
  int m = -1;
  for (const Term& t : terms) {
    m = std::max({m, t.i, t.j});
    for (int s : t.idx) m = std::max(m, s);
    m = std::max(m, max_slot(t.inner));
  }
  return m;
}

Term Term::constant(double v) {
  Term t;
  t.kind = Kind::Const;
  t.c = v;
  return t;
}

Term Term::lin(int slot, double c) {
  Term t;
  t.kind = Kind::Lin;
  t.i = slot;
  t.c = c;
  return t;
}

Term Term::quad(int slot, double c) {
  Term t;
  t.kind = Kind::Quad;
  t.i = slot;
  t.c = c;
  return t;
}

Term Term::prod2(int a, int b, double c) {
  Term t;
  t.kind = Kind::Prod2;
  t.i = a;
  t.j = b;
  t.c = c;
  return t;
}

Term Term::exp_lin(std::vector<int> slots, std::vector<double> coef, double c) {
  if (slots.size() != coef.size()) throw std::invalid_argument("exp_lin: slot/coef mismatch");
  Term t;
  t.kind = Kind::ExpLin;
  t.idx = std::move(slots);
  t.coef = std::move(coef);
  t.c = c;
  return t;
}

Term Term::sin_prod2(int a, int b, double c) {
  Term t;
  t.kind = Kind::SinProd2;
  t.i = a;
  t.j = b;
  t.c = c;
  return t;
}

Term Term::tanh_of(int slot, double gain, double scale) {
  Term t;
  t.kind = Kind::Tanh;
  t.i = slot;
  t.c = gain;
  t.scale = scale;
  return t;
}

Term Term::logistic(double span, std::vector<Term> exponent) {
  Term t;
  t.kind = Kind::Logistic;
  t.c = span;
  t.inner = std::move(exponent);
  return t;
}

Term Term::log_sigmoid(std::vector<Term> exponent) {
  Term t;
  t.kind = Kind::LogSigmoid;
  t.c = 1.0;
  t.inner = std::move(exponent);
  return t;
}

double Mechanism::eval(std::span<const double> parents, double noise_draw) const {
  const double v = eval_terms(terms, parents);
  const double s = noise.scale_terms.empty() ? noise.scale : eval_terms(noise.scale_terms, parents);
  switch (noise.kind) {
    case NoiseSpec::Kind::Additive:
      return v + s * noise_draw;
    case NoiseSpec::Kind::MultExp:
      return v * std::exp(s * noise_draw);
    case NoiseSpec::Kind::MultRaw:
      return v * s * noise_draw;
    case NoiseSpec::Kind::BernoulliU:
      return noise_draw < std::clamp(v, 0.0, 1.0) ? 1.0 : 0.0;
    case NoiseSpec::Kind::BernoulliExpU:
      return noise_draw < std::clamp(std::exp(v), 0.0, 1.0) ? 1.0 : 0.0;
  }
  throw std::logic_error("unreachable noise kind");
}

int Mechanism::max_slot() const {
  int m = scm::max_slot(terms);
  m = std::max(m, scm::max_slot(noise.scale_terms));
  return m;
}

}  // namespace acee::scm
