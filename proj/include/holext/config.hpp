#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "holext/function_models.hpp"
#include "holext/multi_index.hpp"
#include "holext/phi_families.hpp"
#include "holext/sequences.hpp"

namespace holext {

/// Raised for malformed or inconsistent configuration. `line`/`column` are
/// 1-based and 0 when unknown; `key` is the dotted key path when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string key = {}, int line = 0, int column = 0);
  const std::string& key() const { return key_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string key_;
  int line_;
  int column_;
};

struct SequenceSpec {
  std::string kind = "gevrey";  // gevrey | geometric-gevrey | explicit
  double s = 2.0 / 3.0;
  double c = 1.0;
  std::vector<double> log_terms;  // explicit only
  int k_max = 1200;  // long enough for eps = 0.5 bounds to certify
};

struct InjectSpec {
  int index = 0;
  double delta = 0.0;  // added to ln K at `index` after the fit
};

struct DualSpec {
  double eta = 1e-6;
  double cap = 10.0;
  std::optional<InjectSpec> inject;
};

struct PhiSpec {
  std::string family = "power";
  double p = 2.0;
  int dimension = 1;
  std::vector<double> a{1.0};
};

struct ModelSpec {
  std::string name;  // gaussian | cosine | poly-gaussian | exp-square
  double c = 1.0;
  double scale = 1.0;
  std::vector<double> poly;
  int dimension = 0;  // 0 = take the family dimension
};

struct GridSpecs {
  std::vector<double> r;      // weight-table and lemma-scan radii
  std::vector<double> x;      // x axis for p estimates and shift sampling
  std::vector<double> y;      // y axis for q estimates
  std::vector<double> R;      // shift radii
  std::vector<double> radii;  // tails for the phi conditions
};

struct Tolerances {
  double lemma = 1e-12;
  double extend = 1e-12;     // absolute slack on |T f(z) - F(z)| beyond the tail bound
  double cauchy = 1e-8;
  double stability = 0.01;   // relative change of b under grid refinement
};

struct VerifySpec {
  std::vector<double> alpha2_eps{0.5, 1.0};
  int p_max = 20;
  double growth_threshold = 1.0;
};

struct ExtendSpec {
  double tol = 1e-12;
  std::vector<double> x;
  std::vector<double> y;
};

struct CauchySpec {
  double radius = 1.0;
  int nodes = 64;
  std::vector<RealPoint> points;
  int alpha_max = 6;
};

struct RoundtripSpec {
  double radius = 1.0;
  int nodes = 128;
  std::vector<RealPoint> points;
  int alpha_max = 6;
  double tail_tol = 1e-12;
  double tol = 1e-8;
  std::vector<ComplexPoint> z;
};

struct RunConfig {
  SequenceSpec sequence;
  DualSpec dual;
  PhiSpec phi;
  std::vector<ModelSpec> models;
  std::vector<int> m{1, 2};
  std::vector<double> eps{0.5, 1.0};
  std::vector<double> delta{1.0};
  GridSpecs grids;
  Tolerances tolerances;
  VerifySpec verify;
  ExtendSpec extend;
  CauchySpec cauchy;
  RoundtripSpec roundtrip;
  int alpha_max = 10;
  int random_directions = 32;
  std::uint64_t seed = 42;
  int threads = 1;
  std::string out = "out";
  std::string text;    // the document as read
  std::string digest;  // SHA-256 of `text`, lowercase hex
};

/// Parses and validates a YAML document. Unknown keys are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::string sha256_hex(const std::string& data);

WeightSequence build_sequence(const SequenceSpec& spec);
PhiFamily build_phi(const PhiSpec& spec);
ProductModel build_model(const ModelSpec& spec, int dimension);

}  // namespace holext
