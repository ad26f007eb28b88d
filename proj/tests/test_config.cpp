#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "holext/config.hpp"

using namespace holext;

namespace {

ConfigError error_for(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a config error for: " << text);
  return ConfigError("unreachable");
}

}  // namespace

TEST_CASE("empty and minimal documents take the defaults") {
  const auto empty = parse_config("");
  CHECK(empty.sequence.kind == "gevrey");
  CHECK(empty.sequence.k_max == 1200);
  CHECK(empty.models.size() == 1);
  CHECK(empty.models[0].dimension == 1);
  CHECK(empty.grids.R.back() == doctest::Approx(30.0));
  CHECK(empty.roundtrip.points.size() == 3);

  const auto cfg = parse_config("phi: {dimension: 2}\nmodels: [{name: cosine}]\nseed: 7\n");
  CHECK(cfg.phi.dimension == 2);
  CHECK(cfg.models[0].dimension == 2);
  CHECK(cfg.seed == 7);
  CHECK(cfg.cauchy.points[0].size() == 2);
  CHECK(cfg.roundtrip.z[0].size() == 2);
}

TEST_CASE("grid shorthands") {
  const auto cfg = parse_config("grids:\n  x: {linspace: [-1, 1, 5]}\n  r: {logspace: [1e-2, 1e2, 5]}\n");
  REQUIRE(cfg.grids.x.size() == 5);
  CHECK(cfg.grids.x[1] == doctest::Approx(-0.5));
  CHECK(cfg.grids.r[2] == doctest::Approx(1.0));
  // keys left out of a partial block keep their defaults
  CHECK(cfg.grids.radii.size() == 100);
  CHECK(error_for("grids:\n  x: {cubic: [0, 1, 3]}\n").key() == "grids.x.cubic");
  CHECK(error_for("grids:\n  r: {logspace: [0, 1, 3]}\n").key() == "grids.r.logspace");
  CHECK(error_for("grids:\n  radii: [1, 2]\n").key() == "grids.radii");
}

TEST_CASE("unknown keys are rejected with a position") {
  const auto e = error_for("seed: 1\nsequence:\n  kind: gevrey\n  colour: red\n");
  CHECK(e.key() == "sequence.colour");
  CHECK(e.line() == 4);
  CHECK(e.column() == 3);
  CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  CHECK(error_for("bogus: 1\n").key() == "bogus");
}

TEST_CASE("invalid values") {
  CHECK(error_for("tolerances: {lemma: -1e-12}\n").key() == "tolerances.lemma");
  CHECK(error_for("phi: {p: 1}\n").key() == "phi.p");
  CHECK(error_for("phi: {p: 0.5}\n").key() == "phi.p");
  CHECK(error_for("sequence: {k_max: 4}\n").key() == "sequence.k_max");
  CHECK(error_for("threads: 0\n").key() == "threads");
  CHECK(error_for("indices: {m: [0]}\n").key() == "indices.m");
  CHECK(error_for("cauchy: {nodes: 2}\n").key() == "cauchy.nodes");
  CHECK(error_for("alpha_max: 61\n").key() == "alpha_max");
  CHECK(error_for("dual: {inject: {index: 3}}\n").key() == "dual.inject");
  CHECK(error_for("sequence: {kind: explicit}\n").key() == "sequence");
  CHECK(error_for("seed: [1, 2]\n").key() == "seed");
}

TEST_CASE("dimension mismatch between model and phi") {
  const auto e = error_for("phi: {dimension: 1}\nmodels:\n  - {name: gaussian, dimension: 2}\n");
  CHECK(e.key() == "models[0].dimension");
  CHECK(e.line() == 3);
  CHECK(error_for("phi: {dimension: 2}\ncauchy: {points: [[0.0]]}\n").key() == "cauchy.points");
}

TEST_CASE("malformed YAML reports a position") {
  const auto e = error_for("seed: [1, 2\n");
  CHECK(e.line() > 0);
}

TEST_CASE("digest is the SHA-256 of the document") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const std::string text = "seed: 3\n";
  CHECK(parse_config(text).digest == sha256_hex(text));
  CHECK(parse_config(text).text == text);
}

TEST_CASE("builders") {
  auto cfg = parse_config("sequence: {kind: geometric-gevrey, s: 0.5, c: 2, k_max: 50}\n");
  const auto M = build_sequence(cfg.sequence);
  CHECK(M.k_max() == 50);
  const auto phi = build_phi(cfg.phi);
  CHECK(phi.dimension() == 1);
  const auto model = build_model(ModelSpec{"cosine", 1.0, 1.0, {}, 1}, 1);
  CHECK(model.name() == "cosine");
  CHECK_THROWS_AS(build_model(ModelSpec{"sine", 1.0, 1.0, {}, 1}, 1), ConfigError);
}
