#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace riesz {

using Index = Eigen::Index;

// Points live in R^1 or R^2; fixed max size keeps them off the heap.
template <class Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, 2, 1>;
using Point = PointT<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.141592653589793238462643383279502884;

enum class ErrorCode {
  ImproperFunction,
  SpecMismatch,
  DualGridTooSmall,
  NonpositiveScale,
  OutsideDomain,
  NoFiniteNeighbor,
  NonUnitDirection,
  OriginNotInterior,
  CertificateNotFound,
  InvalidAlpha,
  UnboundedBody,
  WeightBlowup,
  NonpositiveBeta1,
  EmptyMeasure,
  AmbientMismatch,
  InadmissibleMeasure,
  NoFeasiblePoint,
  ConjugateNotIntegrable,
  InvalidArgument,
  FormatError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::ImproperFunction: return "ImproperFunction";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::DualGridTooSmall: return "DualGridTooSmall";
    case ErrorCode::NonpositiveScale: return "NonpositiveScale";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::NoFiniteNeighbor: return "NoFiniteNeighbor";
    case ErrorCode::NonUnitDirection: return "NonUnitDirection";
    case ErrorCode::OriginNotInterior: return "OriginNotInterior";
    case ErrorCode::CertificateNotFound: return "CertificateNotFound";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::UnboundedBody: return "UnboundedBody";
    case ErrorCode::WeightBlowup: return "WeightBlowup";
    case ErrorCode::NonpositiveBeta1: return "NonpositiveBeta1";
    case ErrorCode::EmptyMeasure: return "EmptyMeasure";
    case ErrorCode::AmbientMismatch: return "AmbientMismatch";
    case ErrorCode::InadmissibleMeasure: return "InadmissibleMeasure";
    case ErrorCode::NoFeasiblePoint: return "NoFeasiblePoint";
    case ErrorCode::ConjugateNotIntegrable: return "ConjugateNotIntegrable";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline Point make_point(double x) {
  Point p(1);
  p(0) = x;
  return p;
}

inline Point make_point(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

inline Point zero_point(int dim) { return Point::Zero(dim); }

// Worker count for the parallel loops. Results never depend on it.
void set_threads(int n);
int threads();

// Static contiguous chunking over [begin, end). fn(i) must only write to
// slots owned by i, so the outcome is independent of the worker count.
template <class Fn>
void parallel_for(Index begin, Index end, Fn&& fn) {
  const Index n = end - begin;
  const int workers = static_cast<int>(std::min<Index>(threads(), std::max<Index>(n, 1)));
  if (workers <= 1 || n < 64) {
    for (Index i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const Index chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const Index a = begin + w * chunk;
    const Index b = std::min(end, a + chunk);
    if (a >= b) break;
    pool.emplace_back([a, b, &fn] {
      for (Index i = a; i < b; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Sum in index order; used after parallel stages that fill per-index partials.
template <class Derived>
double ordered_sum(const Eigen::DenseBase<Derived>& v) {
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += v(i);
  return s;
}

}  // namespace riesz
