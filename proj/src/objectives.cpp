#include "adolf/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "adolf/idx.hpp"

namespace adolf {

void LocalObjective::check_dimension(const Vector& x) const {
  if (x.size() != dimension()) {
    throw shape_error("expected a vector of dimension " +
                      std::to_string(dimension()) + ", got " +
                      std::to_string(x.size()));
  }
}

// ---------------------------------------------------------------- ridge

RidgeObjective::RidgeObjective(Matrix a, Vector b, double gamma)
    : a_(std::move(a)), b_(std::move(b)), gamma_(gamma) {
  if (a_.rows() != b_.size()) throw shape_error("ridge: A and b row mismatch");
  if (a_.rows() == 0) throw invalid_argument("ridge: need at least one sample");
  if (!(gamma_ > 0.0)) throw invalid_argument("ridge: gamma must be positive");
}

double RidgeObjective::value(const Vector& x) const {
  check_dimension(x);
  const double n = static_cast<double>(a_.rows());
  return (a_ * x - b_).squaredNorm() / n + 0.5 * gamma_ * x.squaredNorm();
}

Vector RidgeObjective::gradient(const Vector& x) const {
  check_dimension(x);
  const double n = static_cast<double>(a_.rows());
  return (2.0 / n) * (a_.transpose() * (a_ * x - b_)) + gamma_ * x;
}

std::optional<QuadraticForm> RidgeObjective::quadratic_form() const {
  const double n = static_cast<double>(a_.rows());
  const int d = dimension();
  QuadraticForm q;
  q.hessian = (2.0 / n) * (a_.transpose() * a_) + gamma_ * Matrix::Identity(d, d);
  q.linear = (2.0 / n) * (a_.transpose() * b_);
  q.offset = b_.squaredNorm() / n;
  return q;
}

// ------------------------------------------------------------- logistic

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

// 1 / (1 + exp(-z)) without overflow.
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

LogisticObjective::LogisticObjective(Matrix features, Vector labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rows() != labels_.size()) {
    throw shape_error("logistic: features and labels row mismatch");
  }
  if (features_.rows() == 0) throw invalid_argument("logistic: need at least one sample");
  for (Eigen::Index j = 0; j < labels_.size(); ++j) {
    if (labels_(j) != 1.0 && labels_(j) != -1.0) {
      throw invalid_argument("logistic: labels must be -1 or +1");
    }
  }
}

double LogisticObjective::value(const Vector& x) const {
  check_dimension(x);
  const Vector margins = labels_.cwiseProduct(features_ * x);
  double total = 0.0;
  for (Eigen::Index j = 0; j < margins.size(); ++j) total += softplus(-margins(j));
  return total / static_cast<double>(margins.size());
}

Vector LogisticObjective::gradient(const Vector& x) const {
  check_dimension(x);
  const Vector margins = labels_.cwiseProduct(features_ * x);
  Vector weights(margins.size());
  for (Eigen::Index j = 0; j < margins.size(); ++j) {
    weights(j) = -labels_(j) * sigmoid(-margins(j));
  }
  return features_.transpose() * weights / static_cast<double>(margins.size());
}

// ------------------------------------------------------------ quadratic

QuadraticObjective::QuadraticObjective(Matrix q, Vector c)
    : q_(std::move(q)), c_(std::move(c)) {
  if (q_.rows() != q_.cols() || q_.rows() != c_.size()) {
    throw shape_error("quadratic: Q must be d x d and c of length d");
  }
  if ((q_ - q_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + q_.cwiseAbs().maxCoeff())) {
    throw invalid_argument("quadratic: Q must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(q_, Eigen::EigenvaluesOnly);
  mu_ = std::max(0.0, solver.eigenvalues()(0));
  if (solver.eigenvalues()(0) < -1e-12) {
    throw invalid_argument("quadratic: Q must be positive semidefinite");
  }
}

double QuadraticObjective::value(const Vector& x) const {
  check_dimension(x);
  return 0.5 * x.dot(q_ * x) - c_.dot(x);
}

Vector QuadraticObjective::gradient(const Vector& x) const {
  check_dimension(x);
  return q_ * x - c_;
}

std::optional<QuadraticForm> QuadraticObjective::quadratic_form() const {
  return QuadraticForm{q_, c_, 0.0};
}

// -------------------------------------------------------------- problem

ProblemInstance::ProblemInstance(
    std::vector<std::shared_ptr<const LocalObjective>> objectives)
    : objectives_(std::move(objectives)) {
  if (objectives_.empty()) throw invalid_argument("problem needs at least one agent");
  d_ = objectives_.front()->dimension();
  for (const auto& f : objectives_) {
    if (!f) throw invalid_argument("null local objective");
    if (f->dimension() != d_) throw shape_error("local objectives disagree on dimension");
  }
}

void ProblemInstance::check_stack(const Matrix& x) const {
  if (x.rows() != agents() || x.cols() != d_) {
    throw shape_error("expected a " + std::to_string(agents()) + "x" +
                      std::to_string(d_) + " stack, got " +
                      std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
}

double ProblemInstance::stacked_value(const Matrix& x) const {
  check_stack(x);
  double total = 0.0;
  for (int i = 0; i < agents(); ++i) total += objectives_[i]->value(x.row(i).transpose());
  return total;
}

Matrix ProblemInstance::stacked_gradient(const Matrix& x) const {
  check_stack(x);
  Matrix g(x.rows(), x.cols());
  for (int i = 0; i < agents(); ++i) {
    g.row(i) = objectives_[i]->gradient(x.row(i).transpose()).transpose();
  }
  return g;
}

double ProblemInstance::average_value(const Vector& x) const {
  double total = 0.0;
  for (const auto& f : objectives_) total += f->value(x);
  return total / agents();
}

Vector ProblemInstance::average_gradient(const Vector& x) const {
  Vector g = Vector::Zero(d_);
  for (const auto& f : objectives_) g += f->gradient(x);
  return g / agents();
}

bool ProblemInstance::all_quadratic() const {
  return std::all_of(objectives_.begin(), objectives_.end(),
                     [](const auto& f) { return f->quadratic_form().has_value(); });
}

// ----------------------------------------------------------- generators

ProblemInstance synth_ridge(int m, int n, int d, std::uint64_t seed) {
  if (m < 1 || n < 1 || d < 1) throw invalid_argument("synth_ridge: m, n, d must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::shared_ptr<const LocalObjective>> objectives;
  objectives.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    Matrix a(n, d);
    Vector b(n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < d; ++c) a(r, c) = normal(rng);
    for (int r = 0; r < n; ++r) b(r) = normal(rng);
    const double gamma = 0.1 + 0.1 * i;
    objectives.push_back(std::make_shared<RidgeObjective>(std::move(a), std::move(b), gamma));
  }
  return ProblemInstance(std::move(objectives));
}

ProblemInstance synth_logistic(int m, int n, int d, std::uint64_t seed, double noise) {
  if (m < 1 || n < 1 || d < 1) throw invalid_argument("synth_logistic: m, n, d must be >= 1");
  if (!(noise >= 0.0 && noise < 0.5)) {
    throw invalid_argument("synth_logistic: noise must lie in [0, 0.5)");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Vector separator(d);
  for (int c = 0; c < d; ++c) separator(c) = normal(rng);
  std::vector<std::shared_ptr<const LocalObjective>> objectives;
  objectives.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    Matrix a(n, d);
    Vector b(n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < d; ++c) a(r, c) = normal(rng);
      double label = a.row(r).dot(separator) >= 0.0 ? 1.0 : -1.0;
      if (coin(rng) < noise) label = -label;
      b(r) = label;
    }
    objectives.push_back(std::make_shared<LogisticObjective>(std::move(a), std::move(b)));
  }
  return ProblemInstance(std::move(objectives));
}

ProblemInstance partition_binary_digits(const std::vector<std::uint8_t>& pixels,
                                        const std::vector<std::uint8_t>& labels,
                                        int pixels_per_image, int m,
                                        std::pair<int, int> digit_pair,
                                        std::uint64_t seed) {
  const auto [positive, negative] = digit_pair;
  if (positive == negative) throw invalid_argument("digit pair must be two distinct digits");
  if (m < 1) throw invalid_argument("need at least one agent");
  const std::size_t count = labels.size();
  if (pixels.size() < count * static_cast<std::size_t>(pixels_per_image)) {
    throw data_error("image payload shorter than label count");
  }
  std::vector<std::size_t> kept;
  for (std::size_t s = 0; s < count; ++s) {
    if (labels[s] == positive || labels[s] == negative) kept.push_back(s);
  }
  if (kept.size() < static_cast<std::size_t>(m)) {
    throw data_error("insufficient data: " + std::to_string(kept.size()) +
                     " samples for " + std::to_string(m) + " agents");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(kept.begin(), kept.end(), rng);
  const std::size_t per_agent = kept.size() / static_cast<std::size_t>(m);
  std::vector<std::shared_ptr<const LocalObjective>> objectives;
  for (int i = 0; i < m; ++i) {
    Matrix a(static_cast<Eigen::Index>(per_agent), pixels_per_image);
    Vector b(static_cast<Eigen::Index>(per_agent));
    for (std::size_t r = 0; r < per_agent; ++r) {
      const std::size_t s = kept[static_cast<std::size_t>(i) * per_agent + r];
      const std::uint8_t* img = pixels.data() + s * static_cast<std::size_t>(pixels_per_image);
      for (int c = 0; c < pixels_per_image; ++c) {
        a(static_cast<Eigen::Index>(r), c) = img[c] / 255.0;
      }
      b(static_cast<Eigen::Index>(r)) = labels[s] == positive ? 1.0 : -1.0;
    }
    objectives.push_back(std::make_shared<LogisticObjective>(std::move(a), std::move(b)));
  }
  return ProblemInstance(std::move(objectives));
}

ProblemInstance load_mnist_partition(const std::string& images_path,
                                     const std::string& labels_path, int m,
                                     std::pair<int, int> digit_pair,
                                     std::uint64_t seed) {
  const idx::Images images = idx::read_images(images_path);
  const idx::Labels labels = idx::read_labels(labels_path);
  if (images.count != labels.count) {
    throw data_error("MNIST image and label counts differ");
  }
  return partition_binary_digits(images.pixels, labels.values,
                                 static_cast<int>(images.rows * images.cols), m,
                                 digit_pair, seed);
}

// -------------------------------------------------------- serialization

namespace {

constexpr char kSnapshotMagic[8] = {'A', 'D', 'O', 'L', 'F', 'P', 'B', '1'};

enum class Kind : std::uint8_t { Ridge = 1, Logistic = 2, Quadratic = 3 };

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw data_error("problem snapshot: truncated stream");
  }
  return v;
}

void put_matrix(std::ostream& os, const Matrix& a) {
  put<std::int64_t>(os, a.rows());
  put<std::int64_t>(os, a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) put<double>(os, a(r, c));
}

Matrix get_matrix(std::istream& is) {
  const auto rows = get<std::int64_t>(is);
  const auto cols = get<std::int64_t>(is);
  if (rows < 0 || cols < 0 || rows > (1 << 26) || cols > (1 << 26)) {
    throw data_error("problem snapshot: implausible matrix shape");
  }
  Matrix a(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = get<double>(is);
  return a;
}

}  // namespace

void save_problem(std::ostream& os, const ProblemInstance& problem) {
  os.write(kSnapshotMagic, sizeof(kSnapshotMagic));
  put<std::int32_t>(os, problem.agents());
  for (const auto& f : problem.objectives()) {
    if (const auto* r = dynamic_cast<const RidgeObjective*>(f.get())) {
      put(os, Kind::Ridge);
      put_matrix(os, r->a());
      put_matrix(os, r->b());
      put<double>(os, r->gamma());
    } else if (const auto* l = dynamic_cast<const LogisticObjective*>(f.get())) {
      put(os, Kind::Logistic);
      put_matrix(os, l->features());
      put_matrix(os, l->labels());
    } else if (const auto* q = dynamic_cast<const QuadraticObjective*>(f.get())) {
      const auto form = q->quadratic_form();
      put(os, Kind::Quadratic);
      put_matrix(os, form->hessian);
      put_matrix(os, form->linear);
    } else {
      throw invalid_argument("save_problem: unsupported objective type");
    }
  }
}

ProblemInstance load_problem(std::istream& is) {
  char magic[sizeof(kSnapshotMagic)];
  if (!is.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0) {
    throw data_error("problem snapshot: bad magic");
  }
  const auto m = get<std::int32_t>(is);
  if (m < 1) throw data_error("problem snapshot: bad agent count");
  std::vector<std::shared_ptr<const LocalObjective>> objectives;
  for (int i = 0; i < m; ++i) {
    const auto kind = get<Kind>(is);
    switch (kind) {
      case Kind::Ridge: {
        Matrix a = get_matrix(is);
        Vector b = get_matrix(is);
        const double gamma = get<double>(is);
        objectives.push_back(std::make_shared<RidgeObjective>(std::move(a), std::move(b), gamma));
        break;
      }
      case Kind::Logistic: {
        Matrix a = get_matrix(is);
        Vector b = get_matrix(is);
        objectives.push_back(std::make_shared<LogisticObjective>(std::move(a), std::move(b)));
        break;
      }
      case Kind::Quadratic: {
        Matrix q = get_matrix(is);
        Vector c = get_matrix(is);
        objectives.push_back(std::make_shared<QuadraticObjective>(std::move(q), std::move(c)));
        break;
      }
      default:
        throw data_error("problem snapshot: unknown objective tag");
    }
  }
  return ProblemInstance(std::move(objectives));
}

}  // namespace adolf
