#include "acee/diffusion/score_model.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace acee::diffusion {

Perturbed forward_perturb(double y0, double tau, const Schedule& schedule, numerics::Rng& rng) {
  schedule.validate();
  if (!schedule.contains(tau))
    throw std::invalid_argument("forward_perturb: tau outside [tau_min, tau_max]");
  const double eps = rng.normal();
  Perturbed out;
  out.y_tau = schedule.alpha(tau) * y0 + schedule.sigma(tau) * eps;
  out.score_target = -eps / schedule.sigma(tau);
  return out;
}

ScoreModel::ScoreModel(ConditioningLayout layout, Eigen::Index embed_dim,
                       const std::vector<Eigen::Index>& embed_hidden,
                       const std::vector<Eigen::Index>& head_hidden, Schedule schedule,
                       std::uint64_t init_seed)
    : layout_(layout), schedule_(schedule) {
  schedule_.validate();
  if (layout_.dim() < 1) throw std::invalid_argument("ScoreModel: empty conditioning");
  if (embed_dim < 1) throw std::invalid_argument("ScoreModel: embed dim must be >= 1");

  std::vector<Eigen::Index> edims{layout_.dim()};
  edims.insert(edims.end(), embed_hidden.begin(), embed_hidden.end());
  edims.push_back(embed_dim);
  embed_ = numerics::Mlp(edims);

  std::vector<Eigen::Index> hdims{1 + embed_dim + 2};  // z, h, (tau, e^{-tau/2})
  hdims.insert(hdims.end(), head_hidden.begin(), head_hidden.end());
  hdims.push_back(1);
  head_ = numerics::Mlp(hdims);

  numerics::Rng rng(init_seed, 0x5c03e);
  embed_.init_random(rng);
  head_.init_random(rng);

  cond_mean_ = Vector::Zero(layout_.dim());
  cond_scale_ = Vector::Ones(layout_.dim());
}

ScoreModel ScoreModel::with_defaults(ConditioningLayout layout, Schedule schedule,
                                     std::uint64_t init_seed) {
  return ScoreModel(layout, 16, {64, 64}, {128, 128, 128}, schedule, init_seed);
}

void ScoreModel::set_standardization(Vector cond_mean, Vector cond_scale, double y_mean,
                                     double y_scale) {
  if (cond_mean.size() != layout_.dim() || cond_scale.size() != layout_.dim())
    throw std::invalid_argument("ScoreModel: standardization dims mismatch");
  if (y_scale <= 0.0 || (cond_scale.array() <= 0.0).any())
    throw std::invalid_argument("ScoreModel: scales must be positive");
  cond_mean_ = std::move(cond_mean);
  cond_scale_ = std::move(cond_scale);
  y_mean_ = y_mean;
  y_scale_ = y_scale;
}

void ScoreModel::standardize_from(const Matrix& cond, const Vector& y) {
  if (cond.cols() != layout_.dim())
    throw std::invalid_argument("ScoreModel: conditioning dim mismatch");
  if (cond.rows() != y.size() || cond.rows() < 2)
    throw std::invalid_argument("ScoreModel: need at least two rows of training data");
  Vector mean = cond.colwise().mean();
  Vector scale(cond.cols());
  for (Eigen::Index c = 0; c < cond.cols(); ++c) {
    const double var =
        (cond.col(c).array() - mean[c]).square().sum() / static_cast<double>(cond.rows() - 1);
    scale[c] = var > 0.0 ? std::sqrt(var) : 1.0;  // constant columns pass through
  }
  const double ym = y.mean();
  const double yvar = (y.array() - ym).square().sum() / static_cast<double>(y.size() - 1);
  set_standardization(std::move(mean), std::move(scale), ym,
                      yvar > 0.0 ? std::sqrt(yvar) : 1.0);
}

Matrix ScoreModel::standardize_cond(const Matrix& cond) const {
  if (cond.cols() != layout_.dim())
    throw std::invalid_argument("ScoreModel: conditioning dim mismatch");
  return (cond.rowwise() - cond_mean_.transpose()) * cond_scale_.cwiseInverse().asDiagonal();
}

Matrix ScoreModel::head_input(const Vector& z, const Vector& h, double tau) const {
  Matrix in(z.size(), 1 + h.size() + 2);
  in.col(0) = z;
  in.middleCols(1, h.size()).rowwise() = h.transpose();
  in.col(1 + h.size()).setConstant(tau);
  in.col(2 + h.size()).setConstant(std::exp(-0.5 * tau));
  return in;
}

Vector ScoreModel::eps_hat(const Vector& z, const Vector& h, double tau) const {
  return head_.forward_batch(head_input(z, h, tau)).col(0);
}

double ScoreModel::score_std(double y_std, const Vector& cond_raw, double tau) const {
  Matrix cond(1, layout_.dim());
  cond.row(0) = cond_raw;
  const Vector h = embed_batch(standardize_cond(cond)).row(0).transpose();
  Vector z(1);
  z[0] = y_std;
  return -eps_hat(z, h, tau)[0] / schedule_.sigma(tau);
}

Vector ScoreModel::sample(const Vector& cond_raw, Eigen::Index m, numerics::Rng& rng) const {
  if (m < 0) throw std::invalid_argument("ScoreModel::sample: negative count");
  if (m == 0) return Vector(0);

  Matrix cond(1, layout_.dim());
  cond.row(0) = cond_raw;
  const Vector h = embed_batch(standardize_cond(cond)).row(0).transpose();

  auto integrate = [&](Eigen::Index count) {
    Vector z = rng.normal_vector(count);
    const double dt = (schedule_.tau_max - schedule_.tau_min) /
                      static_cast<double>(schedule_.steps);
    const double sqrt_dt = std::sqrt(dt);
    for (Eigen::Index step = 0; step < schedule_.steps; ++step) {
      const double tau = schedule_.tau_max - static_cast<double>(step) * dt;
      const Vector score = -eps_hat(z, h, tau) / schedule_.sigma(tau);
      z += dt * (0.5 * z + score) + sqrt_dt * rng.normal_vector(count);
    }
    return z;
  };

  Vector z = integrate(m);
  if (!z.allFinite()) {
    // one retry for the rejected draws, then give up
    std::vector<Eigen::Index> bad;
    for (Eigen::Index i = 0; i < m; ++i)
      if (!std::isfinite(z[i])) bad.push_back(i);
    const Vector retry = integrate(static_cast<Eigen::Index>(bad.size()));
    if (!retry.allFinite())
      throw std::runtime_error("ScoreModel::sample: non-finite state during reverse integration");
    for (std::size_t r = 0; r < bad.size(); ++r) z[bad[r]] = retry[r];
  }
  return (z.array() * y_scale_ + y_mean_).matrix();
}

DsmBatchResult dsm_loss(const ScoreModel& model, const Matrix& cond, const Vector& y,
                        Eigen::Index time_draws, LossWeighting weighting, numerics::Rng& rng) {
  const Eigen::Index b = cond.rows();
  if (b == 0 || b != y.size()) throw std::invalid_argument("dsm_loss: empty or mismatched batch");
  if (time_draws < 1) throw std::invalid_argument("dsm_loss: time_draws must be >= 1");

  const Schedule& sch = model.schedule();
  const Eigen::Index rows = b * time_draws;
  const Eigen::Index dh = model.embed_dim();

  const Matrix cond_std = model.standardize_cond(cond);
  const Matrix h = model.embed_batch(cond_std);  // b x dh
  const Vector y_std = (y.array() - model.y_mean()) / model.y_scale();

  Matrix head_in(rows, 1 + dh + 2);
  Vector eps(rows), weight(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index ex = r % b;
    const double tau = rng.uniform(sch.tau_min, sch.tau_max);
    eps[r] = rng.normal();
    head_in(r, 0) = sch.alpha(tau) * y_std[ex] + sch.sigma(tau) * eps[r];
    head_in.block(r, 1, 1, dh) = h.row(ex);
    head_in(r, 1 + dh) = tau;
    head_in(r, 2 + dh) = std::exp(-0.5 * tau);
    weight[r] = weighting == LossWeighting::Sigma2 ? 1.0 : 1.0 / sch.sigma2(tau);
  }

  const Vector eps_hat = model.head().forward_batch(head_in).col(0);
  const Vector diff = eps_hat - eps;
  DsmBatchResult out;
  out.loss = (weight.array() * diff.array().square()).mean();
  if (!std::isfinite(out.loss)) throw std::runtime_error("dsm_loss: non-finite loss");

  Matrix gout(rows, 1);
  gout.col(0) = 2.0 * weight.cwiseProduct(diff) / static_cast<double>(rows);
  out.head_grads = model.head().backward_batch(head_in, gout);

  // fold the per-draw gradients w.r.t. h back onto the b examples
  Matrix dh_rows = out.head_grads.dinput.middleCols(1, dh);
  Matrix dh_per_example = Matrix::Zero(b, dh);
  for (Eigen::Index r = 0; r < rows; ++r) dh_per_example.row(r % b) += dh_rows.row(r);
  out.embed_grads = model.embed().backward_batch(cond_std, dh_per_example);
  return out;
}

namespace {

using nlohmann::json;

json mlp_to_json(const numerics::Mlp& net) {
  json j;
  j["dims"] = net.dims();
  j["weights"] = json::array();
  j["biases"] = json::array();
  for (const auto& w : net.weights()) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < w.cols(); ++c) row.push_back(w(r, c));
      rows.push_back(row);
    }
    j["weights"].push_back(rows);
  }
  for (const auto& bvec : net.biases()) {
    json row = json::array();
    for (Eigen::Index r = 0; r < bvec.size(); ++r) row.push_back(bvec[r]);
    j["biases"].push_back(row);
  }
  return j;
}

numerics::Mlp mlp_from_json(const json& j) {
  numerics::Mlp net(j.at("dims").get<std::vector<Eigen::Index>>());
  const json& ws = j.at("weights");
  const json& bs = j.at("biases");
  for (std::size_t l = 0; l < net.weights().size(); ++l) {
    auto& w = net.weights()[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = ws.at(l).at(r).at(c).get<double>();
    auto& bvec = net.biases()[l];
    for (Eigen::Index r = 0; r < bvec.size(); ++r) bvec[r] = bs.at(l).at(r).get<double>();
  }
  return net;
}

}  // namespace

std::string ScoreModel::to_json() const {
  json j;
  j["format"] = "acee-score-model";
  j["version"] = 1;
  j["layout"] = {{"x_dim", layout_.x_dim},
                 {"s_dim", layout_.s_dim},
                 {"has_treatment", layout_.has_treatment}};
  j["schedule"] = {{"tau_min", schedule_.tau_min},
                   {"tau_max", schedule_.tau_max},
                   {"steps", schedule_.steps}};
  j["embed"] = mlp_to_json(embed_);
  j["head"] = mlp_to_json(head_);
  j["standardization"] = {
      {"cond_mean", std::vector<double>(cond_mean_.data(), cond_mean_.data() + cond_mean_.size())},
      {"cond_scale",
       std::vector<double>(cond_scale_.data(), cond_scale_.data() + cond_scale_.size())},
      {"y_mean", y_mean_},
      {"y_scale", y_scale_}};
  return j.dump();
}

ScoreModel ScoreModel::from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("format", "") != "acee-score-model")
    throw std::invalid_argument("checkpoint: not a score-model file");
  if (j.at("version").get<int>() != 1)
    throw std::invalid_argument("checkpoint: unsupported version");

  ScoreModel model;
  model.layout_.x_dim = j.at("layout").at("x_dim").get<Eigen::Index>();
  model.layout_.s_dim = j.at("layout").at("s_dim").get<Eigen::Index>();
  model.layout_.has_treatment = j.at("layout").at("has_treatment").get<bool>();
  model.schedule_.tau_min = j.at("schedule").at("tau_min").get<double>();
  model.schedule_.tau_max = j.at("schedule").at("tau_max").get<double>();
  model.schedule_.steps = j.at("schedule").at("steps").get<Eigen::Index>();
  model.schedule_.validate();
  model.embed_ = mlp_from_json(j.at("embed"));
  model.head_ = mlp_from_json(j.at("head"));

  const json& st = j.at("standardization");
  const auto cm = st.at("cond_mean").get<std::vector<double>>();
  const auto cs = st.at("cond_scale").get<std::vector<double>>();
  model.cond_mean_ = Eigen::Map<const Vector>(cm.data(), static_cast<Eigen::Index>(cm.size()));
  model.cond_scale_ = Eigen::Map<const Vector>(cs.data(), static_cast<Eigen::Index>(cs.size()));
  model.y_mean_ = st.at("y_mean").get<double>();
  model.y_scale_ = st.at("y_scale").get<double>();

  if (model.embed_.input_dim() != model.layout_.dim() ||
      model.cond_mean_.size() != model.layout_.dim())
    throw std::invalid_argument("checkpoint: inconsistent dimensions");
  if (model.head_.input_dim() != 1 + model.embed_.output_dim() + 2)
    throw std::invalid_argument("checkpoint: head/embedding dims disagree");
  return model;
}

void ScoreModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << to_json() << "\n";
}

ScoreModel ScoreModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

}  // namespace acee::diffusion
