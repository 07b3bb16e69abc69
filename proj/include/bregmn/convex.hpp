#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bregmn {

// A convex generator f: (0, inf) -> R with f(1) = 0, together with its first
// two derivatives. These drive both the divergence integrands and the
// sample-based estimators, so f' and f'' must be exact, not finite-differenced.
class ConvexGenerator {
 public:
  enum class Id { TLogT, NegLog, Square, Js };

  static const ConvexGenerator& by_name(std::string_view name);
  static const std::vector<std::string>& names();

  const char* name() const { return name_; }
  Id id() const { return id_; }

  double f(double t) const;
  double df(double t) const;
  double d2f(double t) const;

  // Batch evaluation over strictly positive inputs; uses the vectorized
  // log kernel where the generator involves logarithms.
  void f_batch(const double* t, double* out, std::size_t n) const;
  void df_batch(const double* t, double* out, std::size_t n) const;

 private:
  ConvexGenerator(Id id, const char* name) : id_(id), name_(name) {}

  static const ConvexGenerator* find(std::string_view name);

  Id id_;
  const char* name_;
};

}  // namespace bregmn
