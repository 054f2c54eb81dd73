#include "hetemb/embedding.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "hetemb/rotsym.hpp"

namespace hetemb {

double reconstructed_curvature(const Embedding& emb, std::size_t i) {
  const auto k = emb.spec().rotsym_index();
  if (!k || !emb.shift) {
    throw ContractViolation("reconstructed curvature needs a rotsym factor and shift constants");
  }
  const double r = *emb.radial(i);
  return rotsym::curvature(emb.spec().factor(*k).alpha, r) + emb.shift->min_forman -
         emb.shift->delta_hat;
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
  };
  require(tau >= 0.0, "tau must be nonnegative");
  require(epsilon > 0.0, "epsilon must be positive");
  require(gamma > 0.0, "gamma must be positive");
  require(ell_plus > 0.0, "ell_plus must be positive");
  require(delta > 0.0, "delta must be positive");
  require(lambda_rot > 0.0, "lambda_rot must be positive");
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(lr_decay > 0.0, "lr_decay must be positive");
  require(lr_decay_at >= 0.0 && lr_decay_at <= 1.0, "lr_decay_at must lie in [0,1]");
  require(epochs >= 1, "epochs must be at least 1");
  require(radial_init_lo >= 0.0 && radial_init_lo < radial_init_hi,
          "radial_init must be an interval 0 <= lo < hi");
  require(init_tangent_norm >= 0.0, "init_tangent_norm must be nonnegative");
}

namespace {

std::string num(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string TrainConfig::canonical() const {
  std::string s;
  s += "tau=" + num(tau) + "\n";
  s += "epsilon=" + num(epsilon) + "\n";
  s += "gamma=" + num(gamma) + "\n";
  s += "ell_plus=" + num(ell_plus) + "\n";
  s += "delta=" + num(delta) + "\n";
  s += "lambda_rot=" + num(lambda_rot) + "\n";
  s += "learning_rate=" + num(learning_rate) + "\n";
  s += "lr_decay=" + num(lr_decay) + "\n";
  s += "lr_decay_at=" + num(lr_decay_at) + "\n";
  s += "epochs=" + std::to_string(epochs) + "\n";
  s += "batch_pairs=" + (batch_pairs == 0 ? std::string("all") : std::to_string(batch_pairs)) + "\n";
  s += "seed=" + std::to_string(seed) + "\n";
  s += "radial_init_lo=" + num(radial_init_lo) + "\n";
  s += "radial_init_hi=" + num(radial_init_hi) + "\n";
  s += "init_tangent_norm=" + num(init_tangent_norm) + "\n";
  s += std::string("curvature_loss=") +
       (curvature_loss == CurvatureLossKind::Normalized ? "normalized" : "raw") + "\n";
  return s;
}

std::string TrainConfig::digest() const {
  // 64-bit FNV-1a: stable across platforms, unlike std::hash.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hetemb
