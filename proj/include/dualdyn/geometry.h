#ifndef DUALDYN_GEOMETRY_H_
#define DUALDYN_GEOMETRY_H_

// Regularizers, their mirror maps, Bregman divergences and convex conjugates.
//
// A player's regularizer theta lives on a compact convex domain (a box or the
// probability simplex). For a temperature eps > 0 the scaled regularizer
// psi = eps * theta induces the mirror map
//
//   C(z) = argmax_{y in domain} [ y'z - eps * theta(y) ],
//
// which equals the gradient of the conjugate psi^*(z). Everything here is a
// pure function of its arguments.

#include <Eigen/Dense>

#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace dualdyn {

// Stacking convention x = (x^1, ..., x^N): contiguous per-player blocks.
class BlockPartition {
 public:
  BlockPartition() = default;
  explicit BlockPartition(std::vector<Eigen::Index> sizes);

  std::size_t num_blocks() const { return sizes_.size(); }
  Eigen::Index size(std::size_t p) const { return sizes_[p]; }
  Eigen::Index offset(std::size_t p) const { return offsets_[p]; }
  Eigen::Index total() const { return total_; }
  const std::vector<Eigen::Index>& sizes() const { return sizes_; }

  auto block(Eigen::VectorXd& v, std::size_t p) const {
    return v.segment(offsets_[p], sizes_[p]);
  }
  auto block(const Eigen::VectorXd& v, std::size_t p) const {
    return v.segment(offsets_[p], sizes_[p]);
  }

  bool operator==(const BlockPartition& other) const {
    return sizes_ == other.sizes_;
  }

 private:
  std::vector<Eigen::Index> sizes_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index total_ = 0;
};

// A player's strategy set: a box [lo, hi] or the unit simplex of dimension n.
class Domain {
 public:
  enum class Kind { kBox, kSimplex };

  static Domain Simplex(Eigen::Index dim);
  static Domain Box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static Domain Interval(double lo, double hi);

  Kind kind() const { return kind_; }
  bool is_simplex() const { return kind_ == Kind::kSimplex; }
  Eigen::Index dim() const { return dim_; }
  const Eigen::VectorXd& lo() const { return lo_; }
  const Eigen::VectorXd& hi() const { return hi_; }

  // Euclidean projection onto the domain.
  Eigen::VectorXd Project(const Eigen::VectorXd& v) const;
  bool Contains(const Eigen::VectorXd& x, double tol = 1e-12) const;
  // Barycenter of the simplex or midpoint of the box.
  Eigen::VectorXd Center() const;
  // Dirichlet(1) draw on the simplex; uniform on the 1e-6-shrunk box.
  Eigen::VectorXd SampleInterior(std::mt19937_64& rng) const;

  bool operator==(const Domain& other) const;

 private:
  Domain() = default;

  Kind kind_ = Kind::kSimplex;
  Eigen::Index dim_ = 0;
  Eigen::VectorXd lo_;
  Eigen::VectorXd hi_;
};

// Uniform draw in the open interval (0, 1), portable across standard
// libraries.
double UniformOpen01(std::mt19937_64& rng);

Eigen::VectorXd ProjectSimplex(const Eigen::VectorXd& v);
Eigen::VectorXd ProjectBox(const Eigen::VectorXd& v, const Eigen::VectorXd& lo,
                           const Eigen::VectorXd& hi);

enum class RegularizerKind { kEuclidean, kEntropy };

// Config-file names: "euclidean" and "entropy".
std::string_view RegularizerKindName(RegularizerKind kind);
RegularizerKind ParseRegularizerKind(std::string_view name);

// theta(x) = 0.5 |x|^2 on a box or simplex, or the negative entropy
// sum x_i log x_i on a simplex. Both are 1-strongly convex; only the entropy is
// steep.
class Regularizer {
 public:
  Regularizer(RegularizerKind kind, Domain domain);

  static Regularizer Euclidean(Domain domain) {
    return Regularizer(RegularizerKind::kEuclidean, std::move(domain));
  }
  static Regularizer Entropy(Eigen::Index dim) {
    return Regularizer(RegularizerKind::kEntropy, Domain::Simplex(dim));
  }

  RegularizerKind kind() const { return kind_; }
  const Domain& domain() const { return domain_; }
  Eigen::Index dim() const { return domain_.dim(); }
  bool steep() const { return kind_ == RegularizerKind::kEntropy; }
  double rho() const { return 1.0; }

  double Value(const Eigen::VectorXd& x) const;
  // Gradient on dom(d theta); for the entropy this is the relative interior.
  Eigen::VectorXd Gradient(const Eigen::VectorXd& x) const;

 private:
  RegularizerKind kind_;
  Domain domain_;
};

// Per-player regularizers and the common temperature eps.
class MirrorSpec {
 public:
  MirrorSpec(std::vector<Regularizer> blocks, double epsilon);

  const std::vector<Regularizer>& blocks() const { return blocks_; }
  const Regularizer& block(std::size_t p) const { return blocks_[p]; }
  double epsilon() const { return epsilon_; }
  const BlockPartition& partition() const { return partition_; }
  bool all_steep() const;

  MirrorSpec WithEpsilon(double epsilon) const {
    return MirrorSpec(blocks_, epsilon);
  }

 private:
  std::vector<Regularizer> blocks_;
  double epsilon_;
  BlockPartition partition_;
};

// C_eps for one block. The argument is divided by eps before anything else, so
// MirrorMap(reg, eps, z) == MirrorMap(reg, 1, z / eps) bit for bit.
Eigen::VectorXd MirrorMap(const Regularizer& reg, double epsilon,
                          const Eigen::VectorXd& z);
// Stacked C_eps = (C_eps^p)_p.
Eigen::VectorXd MirrorMap(const MirrorSpec& spec, const Eigen::VectorXd& z);

// D(x, y) = theta(x) - theta(y) - grad theta(y)'(x - y). For the entropy y must
// be in the relative interior (every coordinate >= 1e-300).
double Bregman(const Regularizer& reg, const Eigen::VectorXd& x,
               const Eigen::VectorXd& y);
// D_h for h = sum_p theta^p.
double Bregman(const std::vector<Regularizer>& h, const Eigen::VectorXd& x,
               const Eigen::VectorXd& y);

// psi^*(z) = C(z)'z - eps * theta(C(z)).
double ConjugateValue(const Regularizer& reg, double epsilon,
                      const Eigen::VectorXd& z);
double ConjugateValue(const MirrorSpec& spec, const Eigen::VectorXd& z);

// D_{psi^*}(z, z_ref) = psi^*(z) - psi^*(z_ref) - C(z_ref)'(z - z_ref). Equals
// eps * D_theta(C(z_ref), C(z)) whenever z lies in the range of grad psi.
double DualBregman(const Regularizer& reg, double epsilon,
                   const Eigen::VectorXd& z, const Eigen::VectorXd& z_ref);
double DualBregman(const MirrorSpec& spec, const Eigen::VectorXd& z,
                   const Eigen::VectorXd& z_ref);

// A dual point mapped to x by C_eps: eps * grad theta(x). Requires x in
// dom(d theta).
Eigen::VectorXd MirrorPreimage(const MirrorSpec& spec,
                               const Eigen::VectorXd& x);

}  // namespace dualdyn

#endif  // DUALDYN_GEOMETRY_H_
