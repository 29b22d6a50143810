#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

namespace gridvfa {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowKind { eq, le, ge };
enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };
enum class VarStatus : unsigned char { basic, at_lower, at_upper, nonbasic_free };

/// Bounded-variable LP, optionally with a diagonal proximal quadratic
/// rho/2 * sum_j (x_j - center_j)^2 on a designated variable subset.
struct ConvexProgram {
  struct Row {
    RowKind kind = RowKind::eq;
    double rhs = 0.0;
    int tag = -1; // caller-defined marker, e.g. to locate resource rows
    std::vector<std::pair<int, double>> coeffs;
  };

  std::vector<double> lo, hi, obj;
  std::vector<Row> rows;
  double rho = 0.0;
  std::vector<std::pair<int, double>> prox_terms; // (variable, center)

  int add_variable(double lower, double upper, double cost);
  int add_row(RowKind kind, std::vector<std::pair<int, double>> coeffs,
              double rhs, int tag = -1);
  void set_proximal(double rho_value,
                    std::vector<std::pair<int, double>> centers);

  int num_variables() const { return static_cast<int>(obj.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
};

struct SimplexOptions {
  double feas_tol = 1e-8;
  double opt_tol = 1e-9;
  int max_iterations = 200000;
  int refactor_every = 100;
  int stall_limit = 60;    // degenerate pivots before switching to Bland
  int prox_rounds = 3;     // refinement rounds for proximal solves
};

struct Solution {
  SolveStatus status = SolveStatus::infeasible;
  Eigen::VectorXd primal;        // structural variables
  double objective = 0.0;        // includes the quadratic term if present
  Eigen::VectorXd row_duals;     // d(objective)/d(rhs) per row
  Eigen::VectorXd reduced_costs; // per structural variable
  std::vector<VarStatus> vstat;  // structural then slack; warm-start token
  bool degenerate = false;       // some basic variable sits on a bound
  int iterations = 0;
};

Solution solve(const ConvexProgram& program, const SimplexOptions& options = {});

/// Warm-start token that survives the addition of rows to a program with a
/// fixed variable layout: slacks of rows appended after the basis was
/// stored join the basis, everything else keeps its status.
struct BasisHint {
  std::vector<VarStatus> vstat;
  int num_vars = 0;
  int num_rows = 0;

  void store(const Solution& solution, const ConvexProgram& program);
  Solution adapt(const ConvexProgram& program) const;
};

/// Same contract as solve; the hint's basis only affects speed.
Solution warm_solve(const ConvexProgram& program, const Solution& hint,
                    const SimplexOptions& options = {});

/// Repeated solves of one LP under right-hand-side, variable-bound, and
/// row-append edits, keeping the factorized basis alive between calls.
/// Plain LPs only (no proximal term). The session copies the program at
/// construction; later edits go through the setters, not the program.
class ResolveSession {
 public:
  explicit ResolveSession(const ConvexProgram& program,
                          const SimplexOptions& options = {});
  ~ResolveSession();
  ResolveSession(ResolveSession&&) noexcept;
  ResolveSession& operator=(ResolveSession&&) noexcept;

  void set_rhs(int row, double value);
  void set_variable_bounds(int var, double lower, double upper);

  /// Append one constraint row over existing structural variables. The
  /// row's slack joins the basis via a bordered update of the basis
  /// inverse, so no refactorization is needed and the next solve continues
  /// from the current (possibly now infeasible) basis.
  void append_row(RowKind kind,
                  const std::vector<std::pair<int, double>>& coeffs,
                  double rhs);

  /// First call: full solve (optionally from a warm-start basis). Later
  /// calls: re-solve from the current basis.
  Solution solve(const std::vector<VarStatus>* hint = nullptr);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Objective value of the dual solution embedded in `solution`; equals the
/// primal objective at an exact optimum (LP part only).
double dual_objective(const ConvexProgram& program, const Solution& solution);

/// CPLEX-style LP text format, for cross-checking against external solvers.
void write_lp_format(const ConvexProgram& program, std::ostream& os);

} // namespace gridvfa
