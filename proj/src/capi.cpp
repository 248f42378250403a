#include "kq/kq.h"

#include "kq/error.hpp"
#include "kq/expander.hpp"
#include "kq/pencil.hpp"
#include "kq/poly.hpp"
#include "kq/quiver.hpp"
#include "kq/sl2p.hpp"
#include "kq/witness.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <cstring>
#include <string>

struct kq_module {
  kq::KroneckerModule m;
};

namespace {

thread_local std::string last_error;

kq_status status_of(kq::ErrorKind k) {
  switch (k) {
  case kq::ErrorKind::Validation:
    return KQ_ERR_VALIDATION;
  case kq::ErrorKind::Domain:
    return KQ_ERR_DOMAIN;
  case kq::ErrorKind::Shape:
    return KQ_ERR_SHAPE;
  case kq::ErrorKind::Parse:
    return KQ_ERR_PARSE;
  case kq::ErrorKind::Precondition:
    return KQ_ERR_PRECONDITION;
  case kq::ErrorKind::Guard:
    return KQ_ERR_GUARD;
  case kq::ErrorKind::Internal:
    return KQ_ERR_INTERNAL;
  }
  return KQ_ERR_INTERNAL;
}

template <class F> kq_status guarded(F &&body) {
  last_error.clear();
  try {
    body();
    return KQ_OK;
  } catch (const kq::Error &e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
    return KQ_ERR_INTERNAL;
  } catch (const std::exception &e) {
    last_error = e.what();
    return KQ_ERR_INTERNAL;
  }
}

char *dup(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out)
    throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void *p, const char *what) {
  if (!p)
    throw kq::Error(kq::ErrorKind::Validation, std::string("null argument: ") + what);
}

kq::Field field_of(const char *tag) { return tag ? kq::Field::from_tag(tag) : kq::Field::rationals(); }

kq::Scalar rational_or(const char *text, const kq::Scalar &fallback) {
  return text ? kq::parse_rational(text) : fallback;
}

kq::KroneckerModule build(const kq_build_spec &s) {
  need(s.kind, "kind");
  const std::string kind = s.kind;
  const kq::Field f = field_of(s.field);
  if (kind == "P")
    return kq::build_P(s.n, f);
  if (kind == "Q")
    return kq::build_Q(s.n, f);
  if (kind == "R") {
    if (!s.poly) {
      kq::require(s.n >= 1, kq::ErrorKind::Validation, "R needs --poly or n >= 1");
      return kq::build_R(kq::PencilBlock::regular_monomial(s.n), f);
    }
    const auto factors = kq::factor(kq::parse_poly(f, s.poly));
    kq::require(factors.size() == 1, kq::ErrorKind::Validation,
                "R needs a power of one irreducible polynomial");
    return kq::build_R(kq::PencilBlock::regular_poly(factors[0].first, factors[0].second), f);
  }
  if (kind == "theta-pre")
    return kq::build_preprojective_theta(s.d, s.t, f);
  if (kind == "theta-post")
    return kq::build_postinjective_theta(s.d, s.t, f);
  if (kind == "sl2p")
    return kq::theta3_counterexample_module(s.p, f);
  throw kq::Error(kq::ErrorKind::Validation, "unknown module kind '" + kind + "'");
}

nlohmann::json matrix_rows(const kq::Matrix &m) {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j)
      row.push_back(kq::format_scalar(m.at(i, j)));
    rows.push_back(row);
  }
  return rows;
}

bool t_symmetric(const kq::Matrix &t) {
  const std::size_t n = t.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (t.at(i, j) != t.at(n - 1 - i, n - 1 - j))
        return false;
  return true;
}

} // namespace

extern "C" {

void kq_string_free(char *s) { std::free(s); }

const char *kq_version(void) { return "0.1.0"; }

const char *kq_status_name(kq_status status) {
  switch (status) {
  case KQ_OK:
    return "ok";
  case KQ_ERR_VALIDATION:
    return "validation";
  case KQ_ERR_DOMAIN:
    return "domain";
  case KQ_ERR_SHAPE:
    return "shape";
  case KQ_ERR_PARSE:
    return "parse";
  case KQ_ERR_PRECONDITION:
    return "precondition";
  case KQ_ERR_GUARD:
    return "guard";
  case KQ_ERR_INTERNAL:
    return "internal";
  case KQ_ERR_NULL_ARG:
    return "null argument";
  }
  return "unknown";
}

const char *kq_last_error(void) { return last_error.c_str(); }

kq_status kq_module_build(const kq_build_spec *spec, kq_module **out) {
  if (!spec || !out)
    return KQ_ERR_NULL_ARG;
  return guarded([&] { *out = new kq_module{build(*spec)}; });
}

kq_status kq_module_parse(const char *text, kq_module **out) {
  if (!text || !out)
    return KQ_ERR_NULL_ARG;
  return guarded([&] { *out = new kq_module{kq::parse_module(text)}; });
}

kq_status kq_module_to_text(const kq_module *m, char **out) {
  if (!m || !out)
    return KQ_ERR_NULL_ARG;
  return guarded([&] { *out = dup(kq::module_to_text(m->m)); });
}

kq_status kq_module_dims(const kq_module *m, size_t *d, size_t *dim1, size_t *dim2) {
  if (!m)
    return KQ_ERR_NULL_ARG;
  if (d)
    *d = m->m.d;
  if (dim1)
    *dim1 = m->m.dim1;
  if (dim2)
    *dim2 = m->m.dim2;
  return KQ_OK;
}

kq_status kq_module_field(const kq_module *m, char **tag) {
  if (!m || !tag)
    return KQ_ERR_NULL_ARG;
  return guarded([&] { *tag = dup(m->m.field.tag()); });
}

void kq_module_free(kq_module *m) { delete m; }

kq_status kq_witness(const kq_module *m, const char *eps, char **json, int *pass) {
  if (!m || !eps || !json)
    return KQ_ERR_NULL_ARG;
  return guarded([&] {
    const kq::Witness w = kq::witness_for_module(m->m, kq::parse_rational(eps));
    const kq::WitnessReport r = kq::verify_witness(m->m, w);
    *json = dup(kq::witness_to_json(w, r).dump());
    if (pass)
      *pass = r.pass ? 1 : 0;
  });
}

kq_status kq_theta_fragment(size_t d, size_t t, const char *field, const char *eps, size_t l_override,
                            char **json, int *pass) {
  if (!eps || !json)
    return KQ_ERR_NULL_ARG;
  return guarded([&] {
    const kq::Field f = field_of(field);
    kq::StagedOptions opts;
    if (l_override)
      opts.l_override = l_override;
    const kq::Witness w = kq::fragment_postinjective_theta(d, t, kq::parse_rational(eps), f, opts);
    const kq::WitnessReport r = kq::verify_witness(kq::build_postinjective_theta(d, t, f), w);
    nlohmann::json j = kq::witness_to_json(w, r);
    j["stats"]["stages_postinjective"] = kq::stage_components_postinjective(d, w.stats);
    *json = dup(j.dump());
    if (pass)
      *pass = r.pass ? 1 : 0;
  });
}

kq_status kq_best_epsilon(const kq_module *m, size_t l_eps, uint64_t budget, char **json) {
  if (!m || !json)
    return KQ_ERR_NULL_ARG;
  return guarded([&] {
    const kq::BestEpsilon b = kq::empirical_best_epsilon(m->m, l_eps, budget);
    nlohmann::json j = {{"epsilon", b.epsilon.get_str()},
                        {"partial", b.partial},
                        {"method", b.method},
                        {"nodes", b.nodes},
                        {"l_eps", l_eps}};
    *json = dup(j.dump());
  });
}

kq_status kq_decompose(const kq_module *m, char **json) {
  if (!m || !json)
    return KQ_ERR_NULL_ARG;
  return guarded([&] {
    const auto blocks = kq::decompose_pencil(m->m);
    auto arr = nlohmann::json::array();
    for (const auto &b : blocks)
      arr.push_back({{"block", b.to_string()}, {"multiplicity", b.multiplicity}});
    nlohmann::json j = {{"blocks", arr}, {"certified", kq::certify_decomposition(m->m, blocks)}};
    *json = dup(j.dump());
  });
}

kq_status kq_gamma(const kq_module *m, char **text) {
  if (!m || !text)
    return KQ_ERR_NULL_ARG;
  return guarded([&] { *text = dup(kq::gamma_to_text(kq::build_gamma(m->m))); });
}

kq_status kq_rep_dump(uint64_t p, char **text) {
  if (!text)
    return KQ_ERR_NULL_ARG;
  return guarded([&] { *text = dup(kq::rep_dump(p)); });
}

kq_status kq_sl2p_report(uint64_t p, size_t trials, uint64_t seed, char **json) {
  if (!json)
    return KQ_ERR_NULL_ARG;
  return guarded([&] {
    const kq::IrreducibleRep r = kq::irreducible_rep(p);
    const kq::KazhdanEstimate k = kq::adjoint_kazhdan(p, trials, seed);
    nlohmann::json j;
    j["p"] = p;
    j["rho_s"] = matrix_rows(r.mat_s);
    j["rho_t"] = matrix_rows(r.mat_t);
    j["commutant_dim"] = kq::commutant_dim({r.mat_s, r.mat_t});
    j["irreducible"] = kq::is_irreducible({r.mat_s, r.mat_t});
    j["t_symmetric"] = t_symmetric(r.mat_t);
    j["kazhdan"] = {{"lower_bound", k.lower_bound},
                    {"upper_bound", k.upper_bound},
                    {"dimension", k.dimension},
                    {"generators", k.generators},
                    {"normalization", k.normalization},
                    {"trials", trials},
                    {"seed", seed}};
    j["alpha"] = k.alpha;
    if (k.alpha > 0) {
      const kq::Scalar a(k.alpha);
      j["epsilon_bound"] = kq::nonhf_epsilon_bound(a).get_d();
      j["weak_epsilon_bound"] = kq::weak_nonhf_epsilon_bound(a).get_d();
    }
    *json = dup(j.dump());
  });
}

kq_status kq_expander_check(const kq_module *m, const kq_expander_options *opts, char **json,
                            kq_verdict *verdict) {
  if (!m || !opts || !json)
    return KQ_ERR_NULL_ARG;
  return guarded([&] {
    const kq::ExpanderCandidate c = kq::candidate_from_module(
        m->m, rational_or(opts->eta, kq::Scalar(1, 2)), rational_or(opts->alpha, kq::Scalar(1)));
    kq::ExpansionReport r;
    if (opts->sampled) {
      r = kq::check_sampled_rational(c, opts->trials, opts->max_entry, opts->seed);
    } else {
      kq::ExhaustiveOptions o;
      if (opts->guard)
        o.guard = opts->guard;
      o.reverse = opts->reverse != 0;
      r = kq::check_exhaustive(c, o);
    }
    nlohmann::json j = kq::expansion_to_json(r);
    j["n"] = c.n;
    j["field"] = c.field.tag();
    *json = dup(j.dump());
    if (verdict)
      *verdict = r.verdict == kq::ExpansionReport::Verdict::Proved    ? KQ_PROVED
                 : r.verdict == kq::ExpansionReport::Verdict::Refuted ? KQ_REFUTED
                                                                      : KQ_SAMPLED_PASS;
  });
}

kq_status kq_expander_bounds(const char *alpha, char **json) {
  if (!alpha || !json)
    return KQ_ERR_NULL_ARG;
  return guarded([&] {
    const kq::Scalar a = kq::parse_rational(alpha);
    nlohmann::json j = {{"alpha", a.get_str()},
                        {"strong", kq::nonhf_epsilon_bound(a).get_str()},
                        {"weak", kq::weak_nonhf_epsilon_bound(a).get_str()}};
    *json = dup(j.dump());
  });
}

} // extern "C"
