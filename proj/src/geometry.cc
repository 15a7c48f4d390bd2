#include "dualdyn/geometry.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "dualdyn/error.h"

namespace dualdyn {

namespace {

// Coordinates below this are treated as the simplex boundary.
constexpr double kInteriorFloor = 1e-300;

void RequireFinite(const Eigen::VectorXd& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      std::ostringstream msg;
      msg << what << " has non-finite entry at index " << i;
      Fail(ErrorCode::kInvalidInput, msg.str());
    }
  }
}

void RequireSize(const Eigen::VectorXd& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    std::ostringstream msg;
    msg << what << " has length " << v.size() << ", expected " << n;
    Fail(ErrorCode::kInvalidInput, msg.str());
  }
}

// (1 + u) log(1 + u) - u, accurate for small |u|.
double EntropyKernel(double u) {
  if (std::abs(u) < 1e-2) {
    // sum_{k >= 2} (-1)^k u^k / (k (k - 1))
    double term = u * u;
    double sum = 0.0;
    for (int k = 2; k < 12; ++k) {
      sum += ((k % 2 == 0) ? 1.0 : -1.0) * term / (k * (k - 1.0));
      term *= u;
    }
    return sum;
  }
  return (1.0 + u) * std::log1p(u) - u;
}

}  // namespace

BlockPartition::BlockPartition(std::vector<Eigen::Index> sizes)
    : sizes_(std::move(sizes)) {
  if (sizes_.empty()) {
    Fail(ErrorCode::kInvalidInput, "block partition needs at least one block");
  }
  offsets_.reserve(sizes_.size());
  for (Eigen::Index s : sizes_) {
    if (s < 1) Fail(ErrorCode::kInvalidInput, "block sizes must be >= 1");
    offsets_.push_back(total_);
    total_ += s;
  }
}

Domain Domain::Simplex(Eigen::Index dim) {
  if (dim < 1) Fail(ErrorCode::kInvalidDomain, "simplex dimension must be >= 1");
  Domain d;
  d.kind_ = Kind::kSimplex;
  d.dim_ = dim;
  return d;
}

Domain Domain::Box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (lo.size() < 1 || lo.size() != hi.size()) {
    Fail(ErrorCode::kInvalidDomain, "box bounds must be nonempty and equal length");
  }
  RequireFinite(lo, "box lower bound");
  RequireFinite(hi, "box upper bound");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) {
      std::ostringstream msg;
      msg << "box has lo > hi at coordinate " << i;
      Fail(ErrorCode::kInvalidDomain, msg.str());
    }
  }
  Domain d;
  d.kind_ = Kind::kBox;
  d.dim_ = lo.size();
  d.lo_ = std::move(lo);
  d.hi_ = std::move(hi);
  return d;
}

Domain Domain::Interval(double lo, double hi) {
  return Box(Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi));
}

Eigen::VectorXd Domain::Project(const Eigen::VectorXd& v) const {
  RequireSize(v, dim_, "vector to project");
  return is_simplex() ? ProjectSimplex(v) : ProjectBox(v, lo_, hi_);
}

bool Domain::Contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  if (is_simplex()) {
    return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol;
  }
  return ((x - lo_).array() >= -tol).all() && ((hi_ - x).array() >= -tol).all();
}

Eigen::VectorXd Domain::Center() const {
  if (is_simplex()) return Eigen::VectorXd::Constant(dim_, 1.0 / dim_);
  return 0.5 * (lo_ + hi_);
}

Eigen::VectorXd Domain::SampleInterior(std::mt19937_64& rng) const {
  Eigen::VectorXd x(dim_);
  if (is_simplex()) {
    for (Eigen::Index i = 0; i < dim_; ++i) x[i] = -std::log(UniformOpen01(rng));
    return x / x.sum();
  }
  for (Eigen::Index i = 0; i < dim_; ++i) {
    const double shrink = 1e-6 * (hi_[i] - lo_[i]);
    const double a = lo_[i] + shrink;
    const double b = hi_[i] - shrink;
    x[i] = a + (b - a) * UniformOpen01(rng);
  }
  return x;
}

bool Domain::operator==(const Domain& other) const {
  if (kind_ != other.kind_ || dim_ != other.dim_) return false;
  if (is_simplex()) return true;
  return lo_ == other.lo_ && hi_ == other.hi_;
}

double UniformOpen01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

Eigen::VectorXd ProjectSimplex(const Eigen::VectorXd& v) {
  if (v.size() < 1) Fail(ErrorCode::kInvalidInput, "cannot project an empty vector");
  RequireFinite(v, "simplex projection input");
  // Sort-then-threshold: find the largest k with u_k > (sum_{j<=k} u_j - 1)/k.
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumsum += u[k];
    const double candidate = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

Eigen::VectorXd ProjectBox(const Eigen::VectorXd& v, const Eigen::VectorXd& lo,
                           const Eigen::VectorXd& hi) {
  RequireSize(lo, v.size(), "box lower bound");
  RequireSize(hi, v.size(), "box upper bound");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (lo[i] > hi[i]) {
      std::ostringstream msg;
      msg << "box has lo > hi at coordinate " << i;
      Fail(ErrorCode::kInvalidDomain, msg.str());
    }
  }
  return v.cwiseMax(lo).cwiseMin(hi);
}

std::string_view RegularizerKindName(RegularizerKind kind) {
  return kind == RegularizerKind::kEuclidean ? "euclidean" : "entropy";
}

RegularizerKind ParseRegularizerKind(std::string_view name) {
  if (name == "euclidean") return RegularizerKind::kEuclidean;
  if (name == "entropy") return RegularizerKind::kEntropy;
  Fail(ErrorCode::kInvalidParameter,
       "unknown regularizer '" + std::string(name) + "' (expected euclidean or entropy)");
}

Regularizer::Regularizer(RegularizerKind kind, Domain domain)
    : kind_(kind), domain_(std::move(domain)) {
  if (kind_ == RegularizerKind::kEntropy && !domain_.is_simplex()) {
    Fail(ErrorCode::kInvalidDomain, "the entropy regularizer requires a simplex domain");
  }
}

double Regularizer::Value(const Eigen::VectorXd& x) const {
  RequireSize(x, dim(), "regularizer argument");
  if (kind_ == RegularizerKind::kEuclidean) return 0.5 * x.squaredNorm();
  double value = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0) Fail(ErrorCode::kDomainError, "entropy of a negative coordinate");
    if (x[i] > 0.0) value += x[i] * std::log(x[i]);
  }
  return value;
}

Eigen::VectorXd Regularizer::Gradient(const Eigen::VectorXd& x) const {
  RequireSize(x, dim(), "regularizer argument");
  if (kind_ == RegularizerKind::kEuclidean) return x;
  if (x.minCoeff() < kInteriorFloor) {
    Fail(ErrorCode::kDomainError, "entropy gradient requested on the simplex boundary");
  }
  return (x.array().log() + 1.0).matrix();
}

MirrorSpec::MirrorSpec(std::vector<Regularizer> blocks, double epsilon)
    : blocks_(std::move(blocks)), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
    Fail(ErrorCode::kInvalidParameter, "epsilon must be a positive finite number");
  }
  std::vector<Eigen::Index> sizes;
  sizes.reserve(blocks_.size());
  for (const auto& b : blocks_) sizes.push_back(b.dim());
  partition_ = BlockPartition(std::move(sizes));
}

bool MirrorSpec::all_steep() const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](const Regularizer& r) { return r.steep(); });
}

Eigen::VectorXd MirrorMap(const Regularizer& reg, double epsilon,
                          const Eigen::VectorXd& z) {
  if (!(epsilon > 0.0)) Fail(ErrorCode::kInvalidParameter, "epsilon must be > 0");
  RequireSize(z, reg.dim(), "dual vector");
  RequireFinite(z, "dual vector");
  const Eigen::VectorXd y = z / epsilon;
  if (reg.kind() == RegularizerKind::kEuclidean) return reg.domain().Project(y);
  const double shift = y.maxCoeff();
  Eigen::VectorXd e = (y.array() - shift).exp().matrix();
  return e / e.sum();
}

Eigen::VectorXd MirrorMap(const MirrorSpec& spec, const Eigen::VectorXd& z) {
  const BlockPartition& part = spec.partition();
  RequireSize(z, part.total(), "stacked dual vector");
  Eigen::VectorXd x(part.total());
  for (std::size_t p = 0; p < part.num_blocks(); ++p) {
    part.block(x, p) = MirrorMap(spec.block(p), spec.epsilon(), part.block(z, p));
  }
  return x;
}

double Bregman(const Regularizer& reg, const Eigen::VectorXd& x,
               const Eigen::VectorXd& y) {
  RequireSize(x, reg.dim(), "first Bregman argument");
  RequireSize(y, reg.dim(), "second Bregman argument");
  RequireFinite(x, "first Bregman argument");
  RequireFinite(y, "second Bregman argument");
  if (reg.kind() == RegularizerKind::kEuclidean) return 0.5 * (x - y).squaredNorm();
  if (y.minCoeff() < kInteriorFloor) {
    Fail(ErrorCode::kDomainError,
         "entropy Bregman divergence needs a relative-interior second argument");
  }
  if (x.minCoeff() < 0.0) {
    Fail(ErrorCode::kDomainError, "entropy Bregman divergence of a negative point");
  }
  // Termwise x log(x/y) - x + y = y * k((x - y) / y); each term is >= 0 and the
  // linear parts cancel on the simplex.
  double d = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    d += (x[i] == 0.0) ? y[i] : y[i] * EntropyKernel((x[i] - y[i]) / y[i]);
  }
  return d;
}

double Bregman(const std::vector<Regularizer>& h, const Eigen::VectorXd& x,
               const Eigen::VectorXd& y) {
  Eigen::Index offset = 0;
  double d = 0.0;
  for (const auto& reg : h) {
    if (offset + reg.dim() > x.size() || offset + reg.dim() > y.size()) {
      Fail(ErrorCode::kInvalidInput, "stacked Bregman arguments are too short");
    }
    d += Bregman(reg, x.segment(offset, reg.dim()), y.segment(offset, reg.dim()));
    offset += reg.dim();
  }
  if (offset != x.size() || offset != y.size()) {
    Fail(ErrorCode::kInvalidInput, "stacked Bregman arguments do not match the partition");
  }
  return d;
}

double ConjugateValue(const Regularizer& reg, double epsilon,
                      const Eigen::VectorXd& z) {
  if (reg.kind() == RegularizerKind::kEntropy) {
    // eps * log sum exp(z / eps), the closed form of C(z)'z - eps theta(C(z)).
    RequireSize(z, reg.dim(), "dual vector");
    RequireFinite(z, "dual vector");
    const Eigen::VectorXd y = z / epsilon;
    const double shift = y.maxCoeff();
    return epsilon * (shift + std::log((y.array() - shift).exp().sum()));
  }
  const Eigen::VectorXd x = MirrorMap(reg, epsilon, z);
  return x.dot(z) - epsilon * reg.Value(x);
}

double ConjugateValue(const MirrorSpec& spec, const Eigen::VectorXd& z) {
  const BlockPartition& part = spec.partition();
  RequireSize(z, part.total(), "stacked dual vector");
  double value = 0.0;
  for (std::size_t p = 0; p < part.num_blocks(); ++p) {
    value += ConjugateValue(spec.block(p), spec.epsilon(), part.block(z, p));
  }
  return value;
}

double DualBregman(const Regularizer& reg, double epsilon,
                   const Eigen::VectorXd& z, const Eigen::VectorXd& z_ref) {
  RequireSize(z_ref, reg.dim(), "reference dual vector");
  const Eigen::VectorXd x_ref = MirrorMap(reg, epsilon, z_ref);
  const double d = ConjugateValue(reg, epsilon, z) -
                   ConjugateValue(reg, epsilon, z_ref) - x_ref.dot(z - z_ref);
  return std::max(d, 0.0);
}

double DualBregman(const MirrorSpec& spec, const Eigen::VectorXd& z,
                   const Eigen::VectorXd& z_ref) {
  const BlockPartition& part = spec.partition();
  RequireSize(z, part.total(), "stacked dual vector");
  RequireSize(z_ref, part.total(), "stacked reference dual vector");
  double d = 0.0;
  for (std::size_t p = 0; p < part.num_blocks(); ++p) {
    d += DualBregman(spec.block(p), spec.epsilon(), part.block(z, p),
                     part.block(z_ref, p));
  }
  return d;
}

Eigen::VectorXd MirrorPreimage(const MirrorSpec& spec, const Eigen::VectorXd& x) {
  const BlockPartition& part = spec.partition();
  RequireSize(x, part.total(), "stacked primal point");
  Eigen::VectorXd z(part.total());
  for (std::size_t p = 0; p < part.num_blocks(); ++p) {
    part.block(z, p) = spec.epsilon() * spec.block(p).Gradient(part.block(x, p));
  }
  return z;
}

}  // namespace dualdyn
