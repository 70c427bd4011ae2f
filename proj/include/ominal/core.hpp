#ifndef OMINAL_CORE_HPP
#define OMINAL_CORE_HPP

#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

namespace ominal {

/// Structure mode for a session: ordered divisible abelian group over the
/// rationals, or the pure dense linear order on the rationals.
enum class Mode { Odag, Dlo };

inline const char* mode_name(Mode m) { return m == Mode::Odag ? "odag" : "dlo"; }

struct Budgets {
  // Upper bound on the number of conjuncts a single quantifier-elimination
  // step may produce while distributing to disjunctive form.
  std::size_t qe_dnf_limit = 120'000;
  // Upper bound on atoms held by one formula during elimination.
  std::size_t qe_atom_limit = 4'000'000;
  // Depth bound for constructor-tree search in extend_to_definable_type.
  int search_depth = 4;
  // Cap on candidate constructor trees tested per search.
  std::size_t search_candidates = 4000;
  // Largest k probed when measuring pairwise-disjoint subfamilies.
  int disjoint_probe_limit = 12;
};

class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

class mode_error : public error {
public:
  explicit mode_error(const std::string& what) : error(what) {}
};

class arity_error : public error {
public:
  explicit arity_error(const std::string& what) : error(what) {}
};

class budget_error : public error {
public:
  explicit budget_error(const std::string& what) : error(what) {}
};

class parse_error : public error {
public:
  parse_error(const std::string& what, int line, int col)
      : error(what + " at " + std::to_string(line) + ":" + std::to_string(col)),
        line(line), col(col) {}
  int line, col;
};

class precondition_error : public error {
public:
  explicit precondition_error(const std::string& what) : error(what) {}
};

/// Raised when a construction finishes but its own certification checks
/// fail.  Never returned as a value: it signals a bug or an exhausted
/// internal search pool, not a property of the input.
class certification_error : public error {
public:
  explicit certification_error(const std::string& what) : error(what) {}
};

class cancelled_error : public error {
public:
  cancelled_error() : error("operation cancelled") {}
};

/// Cooperative cancellation for long searches.  Operations poll between
/// quantifier-elimination calls.
class CancelToken {
public:
  CancelToken() = default;
  static CancelToken make() {
    CancelToken t;
    t.flag_ = std::make_shared<std::atomic<bool>>(false);
    return t;
  }
  void cancel() const {
    if (flag_) flag_->store(true);
  }
  bool cancelled() const { return flag_ && flag_->load(); }
  void check() const {
    if (cancelled()) throw cancelled_error();
  }

private:
  std::shared_ptr<std::atomic<bool>> flag_;
};

/// Session context threaded through every operation.
struct Ctx {
  Mode mode = Mode::Odag;
  Budgets budgets;
  CancelToken cancel;
  // Counts quantifier eliminations performed, for budget reporting.
  mutable std::shared_ptr<std::atomic<std::uint64_t>> qe_calls =
      std::make_shared<std::atomic<std::uint64_t>>(0);

  void bump_qe() const { qe_calls->fetch_add(1, std::memory_order_relaxed); }
  std::uint64_t qe_count() const { return qe_calls->load(std::memory_order_relaxed); }
};

}  // namespace ominal

#endif  // OMINAL_CORE_HPP
