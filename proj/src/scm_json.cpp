#include "acee/scm/scm_json.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace acee::scm {

namespace {

using nlohmann::json;

std::string term_kind_name(Term::Kind k) {
  switch (k) {
    case Term::Kind::Const:
      return "const";
    case Term::Kind::Lin:
      return "lin";
    case Term::Kind::Quad:
      return "quad";
    case Term::Kind::Prod2:
      return "prod2";
    case Term::Kind::ExpLin:
      return "exp_lin";
    case Term::Kind::SinProd2:
      return "sin_prod2";
    case Term::Kind::Tanh:
      return "tanh";
    case Term::Kind::Logistic:
      return "logistic";
    case Term::Kind::LogSigmoid:
      return "log_sigmoid";
  }
  throw std::logic_error("unreachable term kind");
}

Term::Kind term_kind_from(const std::string& s) {
  if (s == "const") return Term::Kind::Const;
  if (s == "lin") return Term::Kind::Lin;
  if (s == "quad") return Term::Kind::Quad;
  if (s == "prod2") return Term::Kind::Prod2;
  if (s == "exp_lin") return Term::Kind::ExpLin;
  if (s == "sin_prod2") return Term::Kind::SinProd2;
  if (s == "tanh") return Term::Kind::Tanh;
  if (s == "logistic") return Term::Kind::Logistic;
  if (s == "log_sigmoid") return Term::Kind::LogSigmoid;
  throw std::invalid_argument("unknown term kind: " + s);
}

std::string noise_kind_name(NoiseSpec::Kind k) {
  switch (k) {
    case NoiseSpec::Kind::Additive:
      return "additive";
    case NoiseSpec::Kind::MultExp:
      return "mult_exp";
    case NoiseSpec::Kind::MultRaw:
      return "mult_raw";
    case NoiseSpec::Kind::BernoulliU:
      return "bernoulli_u";
    case NoiseSpec::Kind::BernoulliExpU:
      return "bernoulli_exp_u";
  }
  throw std::logic_error("unreachable noise kind");
}

NoiseSpec::Kind noise_kind_from(const std::string& s) {
  if (s == "additive") return NoiseSpec::Kind::Additive;
  if (s == "mult_exp") return NoiseSpec::Kind::MultExp;
  if (s == "mult_raw") return NoiseSpec::Kind::MultRaw;
  if (s == "bernoulli_u") return NoiseSpec::Kind::BernoulliU;
  if (s == "bernoulli_exp_u") return NoiseSpec::Kind::BernoulliExpU;
  throw std::invalid_argument("unknown noise kind: " + s);
}

// slot -> parent label
json term_to_json(const Term& t, const Dag& dag, const std::vector<int>& parents) {
  auto name_of = [&](int slot) {
    if (slot < 0 || slot >= static_cast<int>(parents.size()))
      throw std::out_of_range("term slot outside parent set");
    return dag.label(parents[slot]);
  };
  json j;
  j["kind"] = term_kind_name(t.kind);
  switch (t.kind) {
    case Term::Kind::Const:
      j["c"] = t.c;
      break;
    case Term::Kind::Lin:
    case Term::Kind::Quad:
      j["of"] = name_of(t.i);
      j["c"] = t.c;
      break;
    case Term::Kind::Prod2:
    case Term::Kind::SinProd2:
      j["of"] = name_of(t.i);
      j["and"] = name_of(t.j);
      j["c"] = t.c;
      break;
    case Term::Kind::ExpLin: {
      json names = json::array(), coefs = json::array();
      for (std::size_t l = 0; l < t.idx.size(); ++l) {
        names.push_back(name_of(t.idx[l]));
        coefs.push_back(t.coef[l]);
      }
      j["of"] = names;
      j["coef"] = coefs;
      j["c"] = t.c;
      break;
    }
    case Term::Kind::Tanh:
      j["of"] = name_of(t.i);
      j["c"] = t.c;
      j["scale"] = t.scale;
      break;
    case Term::Kind::Logistic:
    case Term::Kind::LogSigmoid: {
      j["c"] = t.c;
      json inner = json::array();
      for (const Term& u : t.inner) inner.push_back(term_to_json(u, dag, parents));
      j["exponent"] = inner;
      break;
    }
  }
  return j;
}

// parent label -> slot
Term term_from_json(const json& j, const Dag& dag, const std::vector<int>& parents,
                    const std::string& node_label) {
  auto slot_of = [&](const std::string& name) {
    const int id = dag.index_of(name);
    for (std::size_t s = 0; s < parents.size(); ++s)
      if (parents[s] == id) return static_cast<int>(s);
    throw std::invalid_argument("mechanism of " + node_label + " references " + name +
                                ", which is not a declared parent");
  };
  Term t;
  t.kind = term_kind_from(j.at("kind").get<std::string>());
  t.c = t.kind == Term::Kind::Const ? j.at("c").get<double>() : j.value("c", 1.0);
  switch (t.kind) {
    case Term::Kind::Const:
      break;
    case Term::Kind::Lin:
    case Term::Kind::Quad:
      t.i = slot_of(j.at("of").get<std::string>());
      break;
    case Term::Kind::Prod2:
    case Term::Kind::SinProd2:
      t.i = slot_of(j.at("of").get<std::string>());
      t.j = slot_of(j.at("and").get<std::string>());
      break;
    case Term::Kind::ExpLin: {
      for (const auto& name : j.at("of")) t.idx.push_back(slot_of(name.get<std::string>()));
      for (const auto& c : j.at("coef")) t.coef.push_back(c.get<double>());
      if (t.idx.size() != t.coef.size())
        throw std::invalid_argument("exp_lin: of/coef length mismatch");
      break;
    }
    case Term::Kind::Tanh:
      t.i = slot_of(j.at("of").get<std::string>());
      t.scale = j.value("scale", 1.0);
      break;
    case Term::Kind::Logistic:
    case Term::Kind::LogSigmoid:
      for (const auto& u : j.at("exponent"))
        t.inner.push_back(term_from_json(u, dag, parents, node_label));
      break;
  }
  return t;
}

}  // namespace

std::string scm_to_json(const Scm& scm) {
  scm.validate();
  json j;
  j["nodes"] = json::array();
  for (int v = 0; v < scm.dag.node_count(); ++v)
    j["nodes"].push_back({{"name", scm.dag.label(v)}, {"hidden", scm.dag.hidden(v)}});
  j["edges"] = json::array();
  for (auto [p, c] : scm.dag.edges())
    j["edges"].push_back(json::array({scm.dag.label(p), scm.dag.label(c)}));
  if (scm.treatment >= 0) j["treatment"] = scm.dag.label(scm.treatment);
  if (scm.outcome >= 0) j["outcome"] = scm.dag.label(scm.outcome);

  json mechs = json::object();
  for (int v = 0; v < scm.dag.node_count(); ++v) {
    const Mechanism& m = scm.mechanisms[v];
    json terms = json::array();
    for (const Term& t : m.terms) terms.push_back(term_to_json(t, scm.dag, scm.dag.parents(v)));
    json noise;
    noise["kind"] = noise_kind_name(m.noise.kind);
    if (!m.noise.scale_terms.empty()) {
      json st = json::array();
      for (const Term& t : m.noise.scale_terms)
        st.push_back(term_to_json(t, scm.dag, scm.dag.parents(v)));
      noise["scale_terms"] = st;
    } else if (!m.noise.uses_uniform()) {
      noise["scale"] = m.noise.scale;
    }
    mechs[scm.dag.label(v)] = {{"terms", terms}, {"noise", noise}};
  }
  j["mechanisms"] = mechs;
  return j.dump(2);
}

Scm scm_from_json(const std::string& text) {
  const json j = json::parse(text);
  Scm scm;
  for (const auto& node : j.at("nodes"))
    scm.dag.add_node(node.at("name").get<std::string>(), node.value("hidden", false));
  for (const auto& edge : j.at("edges"))
    scm.dag.add_edge(edge.at(0).get<std::string>(), edge.at(1).get<std::string>());

  scm.mechanisms.resize(scm.dag.node_count());
  const json& mechs = j.at("mechanisms");
  for (int v = 0; v < scm.dag.node_count(); ++v) {
    const std::string& label = scm.dag.label(v);
    if (!mechs.contains(label))
      throw std::invalid_argument("missing mechanism for node " + label);
    const json& mj = mechs.at(label);
    Mechanism m;
    for (const auto& t : mj.at("terms"))
      m.terms.push_back(term_from_json(t, scm.dag, scm.dag.parents(v), label));
    const json& nj = mj.at("noise");
    m.noise.kind = noise_kind_from(nj.at("kind").get<std::string>());
    if (nj.contains("scale_terms"))
      for (const auto& t : nj.at("scale_terms"))
        m.noise.scale_terms.push_back(term_from_json(t, scm.dag, scm.dag.parents(v), label));
    else
      m.noise.scale = nj.value("scale", 1.0);
    scm.mechanisms[v] = std::move(m);
  }

  if (j.contains("treatment")) {
    scm.treatment = scm.dag.index_of(j.at("treatment").get<std::string>());
    if (scm.treatment < 0) throw std::invalid_argument("unknown treatment node");
  }
  if (j.contains("outcome")) {
    scm.outcome = scm.dag.index_of(j.at("outcome").get<std::string>());
    if (scm.outcome < 0) throw std::invalid_argument("unknown outcome node");
  }
  scm.validate();
  return scm;
}

Scm load_scm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open SCM file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return scm_from_json(text);
}

void save_scm(const Scm& scm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write SCM file: " + path);
  out << scm_to_json(scm) << "\n";
}

}  // namespace acee::scm
