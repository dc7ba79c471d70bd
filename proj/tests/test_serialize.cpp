#include <doctest.h>

#include <sstream>

#include "cmll/error.hpp"
#include "cmll/harness.hpp"
#include "cmll/serialize.hpp"
#include "cmll/synthetic.hpp"

using namespace cmll;

namespace {

Dataset small_task(std::uint64_t seed) {
  SyntheticSpec s;
  s.instances = 60;
  s.noise_dims = 5;
  s.labels = 6;
  s.cardinality = 2;
  s.seed = seed;
  return make_synthetic(s);
}

template <class Model>
std::string bytes_of(const Model& m) {
  std::ostringstream out;
  save_model(out, m);
  return out.str();
}

}  // namespace

TEST_CASE("linear model round trip is bit exact") {
  const Dataset d = small_task(1);
  CmllParams p;
  p.m = 3;
  p.d = 4;
  p.beta = 0.7;
  p.lambda = 0.1;
  p.seed = 17;
  const CmllModel m = fit_cmll(d, p);
  std::istringstream in(bytes_of(m));
  const CmllModel back = load_cmll_model(in);
  CHECK(back.P == m.P);
  CHECK(back.V == m.V);
  CHECK(back.W == m.W);
  CHECK(back.feature_means == m.feature_means);
  CHECK(back.params.beta == m.params.beta);
  CHECK(back.params.lambda == m.params.lambda);
  CHECK(back.params.seed == m.params.seed);
  CHECK(back.trace.size() == m.trace.size());
  CHECK(back.initial_gamma == m.initial_gamma);
  CHECK(bytes_of(back) == bytes_of(m));
}

TEST_CASE("kernel model and pipeline round trips") {
  const Dataset d = small_task(2);
  CmllParams p;
  p.m = 2;
  p.d = 3;
  const KcmllModel k = fit_kcmll(d, KernelSpec::rbf_median(), p);
  std::istringstream in(bytes_of(k));
  const KcmllModel kb = load_kcmll_model(in);
  CHECK(kb.R == k.R);
  CHECK(kb.X_train == k.X_train);
  CHECK(*kb.spec.gamma == *k.spec.gamma);
  CHECK(bytes_of(kb) == bytes_of(k));

  for (Method method : {Method::cmll, Method::kcmll, Method::cmll_y, Method::mddm, Method::ori}) {
    ExperimentConfig cfg;
    cfg.method = method;
    cfg.standardize = method == Method::cmll;
    const Pipeline pipe = fit_pipeline(d, cfg);
    std::istringstream pin(bytes_of(pipe));
    const Pipeline back = load_pipeline(pin);
    CHECK(bytes_of(back) == bytes_of(pipe));
    CHECK(predict_scores(back, d.X) == predict_scores(pipe, d.X));
  }
}

TEST_CASE("deserialization errors") {
  SUBCASE("declared P dims 3x2 but 5 payload floats") {
    std::string text = "CMLLMDL\nversion 1\nmeta kind cmll_model\nfield P 3 2\npayload\n";
    text += std::string(5 * 8, '\0');
    std::istringstream in(text);
    CHECK_THROWS_AS(ModelArchive::read(in), DeserializeError);
  }
  SUBCASE("extra payload bytes") {
    std::string text = "CMLLMDL\nversion 1\nfield P 1 1\npayload\n";
    text += std::string(2 * 8, '\0');
    std::istringstream in(text);
    CHECK_THROWS_AS(ModelArchive::read(in), DeserializeError);
  }
  SUBCASE("unknown version tag") {
    std::istringstream in("CMLLMDL\nversion v99\npayload\n");
    CHECK_THROWS_AS(ModelArchive::read(in), VersionError);
  }
  SUBCASE("bad magic") {
    std::istringstream in("NOTAMODEL\n");
    CHECK_THROWS_AS(ModelArchive::read(in), DeserializeError);
  }
  SUBCASE("truncated real model") {
    CmllParams p;
    p.m = 2;
    p.d = 2;
    const std::string full = bytes_of(fit_cmll(small_task(3), p));
    std::istringstream in(full.substr(0, full.size() - 3));
    CHECK_THROWS_AS(load_cmll_model(in), DeserializeError);
  }
  SUBCASE("dimension inconsistency") {
    ModelArchive ar;
    CmllParams p;
    p.m = 2;
    p.d = 2;
    std::ostringstream out;
    save_model(out, fit_cmll(small_task(4), p));
    std::string text = out.str();
    const std::string from = "meta d 2\n", to = "meta d 3\n";
    text.replace(text.find(from), from.size(), to);
    std::istringstream in(text);
    CHECK_THROWS_AS(load_cmll_model(in), DeserializeError);
  }
  SUBCASE("wrong kind") {
    CmllParams p;
    p.m = 2;
    p.d = 2;
    std::istringstream in(bytes_of(fit_cmll(small_task(5), p)));
    CHECK_THROWS_AS(load_pipeline(in), DeserializeError);
  }
}

TEST_CASE("payload is little-endian float64") {
  ModelArchive ar;
  ar.put("x", 1.0);
  std::ostringstream out;
  ar.write(out);
  const std::string s = out.str();
  const std::string tail = s.substr(s.size() - 8);
  CHECK(tail == std::string("\x00\x00\x00\x00\x00\x00\xf0\x3f", 8));
}
