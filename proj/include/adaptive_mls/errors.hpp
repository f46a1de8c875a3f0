#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adaptive_mls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: unsorted/duplicate nodes, bad kernel parameters, bad config.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A weighted least-squares system has effective rank below degree + 1.
class RankDeficient : public Error {
 public:
  RankDeficient(double point, std::size_t rank, std::size_t required)
      : Error("rank-deficient least-squares system at x = " + std::to_string(point) + " (rank " +
              std::to_string(rank) + ", need " + std::to_string(required) + ")"),
        point_(point),
        rank_(rank),
        required_(required) {}

  double point() const noexcept { return point_; }
  std::size_t rank() const noexcept { return rank_; }
  std::size_t required() const noexcept { return required_; }

 private:
  double point_;
  std::size_t rank_;
  std::size_t required_;
};

/// The union of subdomains misses part of the approximation interval.
class CoverageGap : public Error {
 public:
  CoverageGap(double lo, double hi)
      : Error("subdomains do not cover [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"),
        lo_(lo),
        hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// A subdomain holds too few data sites for its least-squares fit.
class TooFewMembers : public Error {
 public:
  TooFewMembers(std::size_t subdomain, std::size_t members, std::size_t required)
      : Error("subdomain " + std::to_string(subdomain) + " has " + std::to_string(members) +
              " members, need more than " + std::to_string(required)),
        subdomain_(subdomain),
        members_(members),
        required_(required) {}

  std::size_t subdomain() const noexcept { return subdomain_; }
  std::size_t members() const noexcept { return members_; }
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t subdomain_;
  std::size_t members_;
  std::size_t required_;
};

/// No subdomain is active at the evaluation point.
class Uncovered : public Error {
 public:
  explicit Uncovered(double x)
      : Error("no active subdomain at x = " + std::to_string(x)), x_(x) {}

  double x() const noexcept { return x_; }

 private:
  double x_;
};

}  // namespace adaptive_mls
