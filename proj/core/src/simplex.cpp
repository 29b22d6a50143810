#include "gridvfa/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>

namespace gridvfa {

int ConvexProgram::add_variable(double lower, double upper, double cost) {
  if (lower > upper)
    throw std::invalid_argument("add_variable: lower bound exceeds upper");
  lo.push_back(lower);
  hi.push_back(upper);
  obj.push_back(cost);
  return static_cast<int>(obj.size()) - 1;
}

int ConvexProgram::add_row(RowKind kind,
                           std::vector<std::pair<int, double>> coeffs,
                           double rhs, int tag) {
  for (const auto& [j, a] : coeffs) {
    if (j < 0 || j >= num_variables())
      throw std::invalid_argument("add_row: variable index out of range");
    (void)a;
  }
  rows.push_back(Row{kind, rhs, tag, std::move(coeffs)});
  return static_cast<int>(rows.size()) - 1;
}

void ConvexProgram::set_proximal(double rho_value,
                                 std::vector<std::pair<int, double>> centers) {
  if (rho_value < 0)
    throw std::invalid_argument("set_proximal: rho must be >= 0");
  rho = rho_value;
  prox_terms = std::move(centers);
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kRatioTol = 1e-10;
constexpr double kDegenTol = 1e-7;
// product-form updates below this count leave the inverse accurate enough
// that the defensive refactorization on termination can be skipped
constexpr int kDriftUpdates = 30;

/// Revised simplex with bounded variables and an explicit dense basis
/// inverse. Phase 1 minimizes total bound infeasibility of the basic
/// variables (long-step ratio test); phase 2 is the standard bounded-variable
/// primal method. Slacks give an always-available starting basis.
class Simplex {
public:
  Simplex(const ConvexProgram& p, const SimplexOptions& opt)
      : opt_(opt), m_(p.num_rows()), n_(p.num_variables()),
        ncols_(n_ + m_) {
    // column-wise copy; slack column i is the single entry (i, 1)
    col_ptr_.assign(ncols_ + 1, 0);
    std::vector<int> count(n_, 0);
    for (const auto& row : p.rows)
      for (const auto& [j, a] : row.coeffs)
        if (a != 0.0) ++count[j];
    for (int j = 0; j < n_; ++j) col_ptr_[j + 1] = col_ptr_[j] + count[j];
    for (int j = n_; j < ncols_; ++j) col_ptr_[j + 1] = col_ptr_[j] + 1;
    col_row_.resize(col_ptr_[ncols_]);
    col_val_.resize(col_ptr_[ncols_]);
    std::vector<int> fill(n_, 0);
    for (int i = 0; i < m_; ++i)
      for (const auto& [j, a] : p.rows[i].coeffs)
        if (a != 0.0) {
          const int pos = col_ptr_[j] + fill[j]++;
          col_row_[pos] = i;
          col_val_[pos] = a;
        }
    for (int i = 0; i < m_; ++i) {
      col_row_[col_ptr_[n_ + i]] = i;
      col_val_[col_ptr_[n_ + i]] = 1.0;
    }

    lo_.resize(ncols_);
    hi_.resize(ncols_);
    cost_.assign(ncols_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = p.lo[j];
      hi_[j] = p.hi[j];
      cost_[j] = p.obj[j];
    }
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      b_[i] = p.rows[i].rhs;
      switch (p.rows[i].kind) {
        case RowKind::eq: lo_[n_ + i] = 0.0; hi_[n_ + i] = 0.0; break;
        case RowKind::le: lo_[n_ + i] = 0.0; hi_[n_ + i] = kInf; break;
        case RowKind::ge: lo_[n_ + i] = -kInf; hi_[n_ + i] = 0.0; break;
      }
    }
  }

  Solution run(const std::vector<VarStatus>* hint) {
    init_basis(hint);
    factorize();
    return iterate();
  }

  /// Continue from the current basis after rhs / bound edits; the basis
  /// matrix is unchanged, so the existing factorization stays valid.
  Solution rerun() {
    for (int j = 0; j < ncols_; ++j) {
      if (vstat_[j] == VarStatus::at_lower) xval_[j] = lo_[j];
      else if (vstat_[j] == VarStatus::at_upper) xval_[j] = hi_[j];
    }
    recompute_basics();
    return iterate();
  }

  void set_rhs(int row, double value) { b_[row] = value; }

  void set_variable_bounds(int var, double lower, double upper) {
    lo_[var] = lower;
    hi_[var] = upper;
  }

  /// Append one row whose slack enters the basis. With the slack basic the
  /// new basis matrix is [[B, 0], [r, 1]] (r = the new row restricted to
  /// the old basic columns), whose inverse is the old inverse bordered with
  /// the row [-r B^{-1}, 1] — an O(m^2) update, no refactorization.
  void append_row(RowKind kind,
                  const std::vector<std::pair<int, double>>& coeffs,
                  double rhs) {
    const int new_row = m_;
    std::vector<std::pair<int, double>> a;
    a.reserve(coeffs.size());
    for (const auto& [j, c] : coeffs) {
      if (j < 0 || j >= n_)
        throw std::invalid_argument("append_row: variable index out of range");
      if (c != 0.0) a.emplace_back(j, c);
    }
    // basis not yet initialized before the first solve; run() rebuilds it
    const bool live = static_cast<int>(vstat_.size()) == ncols_;

    Eigen::RowVectorXd bottom;
    if (live && m_ > 0) {
      Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(m_);
      for (int k = 0; k < m_; ++k) {
        const int j = head_[k];
        if (j >= n_) continue;
        for (const auto& [jj, c] : a)
          if (jj == j) {
            r[k] = c;
            break;
          }
      }
      bottom = -(r * Binv_);
    }

    // grow the column-wise matrix copy; each structural column touched by
    // the row gains one trailing entry, and a fresh slack column is added
    {
      std::vector<char> touched(n_, 0);
      for (const auto& [j, c] : a) touched[j] = 1;
      std::vector<int> nptr(ncols_ + 2);
      nptr[0] = 0;
      for (int j = 0; j < ncols_; ++j)
        nptr[j + 1] = nptr[j] + (col_ptr_[j + 1] - col_ptr_[j]) +
                      (j < n_ && touched[j] ? 1 : 0);
      nptr[ncols_ + 1] = nptr[ncols_] + 1;
      std::vector<int> nrow(nptr[ncols_ + 1]);
      std::vector<double> nval(nptr[ncols_ + 1]);
      for (int j = 0; j < ncols_; ++j) {
        int w = nptr[j];
        for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p, ++w) {
          nrow[w] = col_row_[p];
          nval[w] = col_val_[p];
        }
      }
      for (const auto& [j, c] : a) {
        nrow[nptr[j + 1] - 1] = new_row;
        nval[nptr[j + 1] - 1] = c;
      }
      nrow[nptr[ncols_]] = new_row;
      nval[nptr[ncols_]] = 1.0;
      col_ptr_ = std::move(nptr);
      col_row_ = std::move(nrow);
      col_val_ = std::move(nval);
    }

    b_.conservativeResize(m_ + 1);
    b_[m_] = rhs;
    double slack_lo = 0.0, slack_hi = 0.0;
    switch (kind) {
      case RowKind::eq: break;
      case RowKind::le: slack_hi = kInf; break;
      case RowKind::ge: slack_lo = -kInf; break;
    }
    lo_.push_back(slack_lo);
    hi_.push_back(slack_hi);
    cost_.push_back(0.0);

    if (live) {
      vstat_.push_back(VarStatus::basic);
      head_.push_back(ncols_);
      xval_.conservativeResize(ncols_ + 1);
      xval_[ncols_] = 0.0; // recomputed from the basis before the next solve
      y_cost_.conservativeResize(m_ + 1);
      Binv_.conservativeResize(m_ + 1, m_ + 1);
      if (m_ > 0) {
        Binv_.row(m_).head(m_) = bottom;
        Binv_.col(m_).head(m_).setZero();
      }
      Binv_(m_, m_) = 1.0;
    }
    ++m_;
    ++ncols_;
  }

 private:
  Solution iterate() {
    Solution out;
    int iter = 0;
    int degen_streak = 0;
    int final_checks = 0;
    bool bland = false;

    Eigen::VectorXd y(m_), w(m_);

    while (true) {
      if (iter >= opt_.max_iterations) {
        out.status = SolveStatus::iteration_limit;
        break;
      }
      if (iter > 0 && iter % opt_.refactor_every == 0) factorize();

      const bool phase1 = primal_infeasible();

      // pricing
      if (phase1) {
        for (int i = 0; i < m_; ++i) y_cost_[i] = sigma(head_[i]);
      } else {
        for (int i = 0; i < m_; ++i) y_cost_[i] = cost_[head_[i]];
      }
      y.noalias() = Binv_.transpose() * y_cost_;

      int q = -1;
      double best = 0.0;
      double dq = 0.0;
      for (int j = 0; j < ncols_; ++j) {
        if (vstat_[j] == VarStatus::basic) continue;
        if (lo_[j] == hi_[j]) continue; // fixed, never enters
        const double dj = (phase1 ? 0.0 : cost_[j]) - dot_col(j, y);
        double score = 0.0;
        if (vstat_[j] == VarStatus::at_lower && dj < -opt_.opt_tol) score = -dj;
        else if (vstat_[j] == VarStatus::at_upper && dj > opt_.opt_tol) score = dj;
        else if (vstat_[j] == VarStatus::nonbasic_free &&
                 std::abs(dj) > opt_.opt_tol)
          score = std::abs(dj);
        if (score > 0.0) {
          if (bland) { q = j; dq = dj; break; }
          if (score > best) { best = score; q = j; dq = dj; }
        }
      }

      if (q < 0) {
        // candidate termination; if the inverse has drifted through
        // product-form updates, refactor and re-verify before declaring
        if (updates_since_factor_ > kDriftUpdates && final_checks < 2) {
          ++final_checks;
          factorize();
          continue;
        }
        out.status = phase1 ? SolveStatus::infeasible : SolveStatus::optimal;
        break;
      }
      final_checks = 0;

      const double dir =
          (vstat_[q] == VarStatus::at_upper || (vstat_[q] == VarStatus::nonbasic_free && dq > 0))
              ? -1.0
              : 1.0;
      ftran(q, w);

      double step = kInf;
      int leave = -1;       // basis position of leaving variable
      bool leave_at_upper = false;
      bool flip = false;
      const double own_range = hi_[q] - lo_[q]; // inf if a bound is missing

      if (phase1 && !bland) {
        if (!ratio_phase1_longstep(q, dir, w, dq * dir, own_range, step, leave,
                                   leave_at_upper, flip)) {
          // numerically stuck; force a refactor and retry with Bland
          factorize();
          bland = true;
          continue;
        }
      } else {
        ratio_standard(dir, w, own_range, phase1, step, leave, leave_at_upper,
                       flip);
        if (leave < 0 && !flip) {
          if (phase1) { factorize(); bland = true; continue; }
          out.status = SolveStatus::unbounded;
          break;
        }
      }

      if (step <= kRatioTol) ++degen_streak;
      else degen_streak = 0;
      if (degen_streak > opt_.stall_limit) bland = true;
      else if (step > kRatioTol) bland = false;

      // apply the step
      if (step > 0.0) {
        xval_[q] += dir * step;
        for (int i = 0; i < m_; ++i)
          if (w[i] != 0.0) xval_[head_[i]] -= dir * step * w[i];
      }

      if (flip) {
        vstat_[q] = (vstat_[q] == VarStatus::at_lower) ? VarStatus::at_upper
                                                       : VarStatus::at_lower;
        xval_[q] = (vstat_[q] == VarStatus::at_lower) ? lo_[q] : hi_[q];
      } else {
        const int p_out = head_[leave];
        vstat_[p_out] = leave_at_upper ? VarStatus::at_upper : VarStatus::at_lower;
        xval_[p_out] = leave_at_upper ? hi_[p_out] : lo_[p_out];
        head_[leave] = q;
        vstat_[q] = VarStatus::basic;
        update_binv(w, leave);
        ++updates_since_factor_;
        if (updates_since_factor_ >= opt_.refactor_every) factorize();
      }
      ++iter;
    }

    finish(out, iter);
    return out;
  }

  double sigma(int j) const {
    if (xval_[j] > hi_[j] + opt_.feas_tol) return 1.0;
    if (xval_[j] < lo_[j] - opt_.feas_tol) return -1.0;
    return 0.0;
  }

  // a basic variable counts as infeasible only relative to its own bound's
  // magnitude; a global rhs-scaled test would let real violations hide
  // behind unrelated large right-hand sides
  bool primal_infeasible() const {
    for (int i = 0; i < m_; ++i) {
      const int j = head_[i];
      if (std::isfinite(hi_[j]) &&
          xval_[j] > hi_[j] + opt_.feas_tol * (1.0 + std::abs(hi_[j])))
        return true;
      if (std::isfinite(lo_[j]) &&
          xval_[j] < lo_[j] - opt_.feas_tol * (1.0 + std::abs(lo_[j])))
        return true;
    }
    return false;
  }

  double dot_col(int j, const Eigen::VectorXd& y) const {
    double acc = 0.0;
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
      acc += col_val_[p] * y[col_row_[p]];
    return acc;
  }

  void ftran(int j, Eigen::VectorXd& w) const {
    w.setZero();
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
      w += col_val_[p] * Binv_.col(col_row_[p]);
  }

  void init_basis(const std::vector<VarStatus>* hint) {
    vstat_.assign(ncols_, VarStatus::at_lower);
    bool use_hint = false;
    if (hint && static_cast<int>(hint->size()) == ncols_) {
      int basics = 0;
      for (VarStatus s : *hint)
        if (s == VarStatus::basic) ++basics;
      if (basics == m_) {
        vstat_ = *hint;
        use_hint = true;
      }
    }
    if (!use_hint) {
      for (int j = 0; j < n_; ++j) {
        if (std::isfinite(lo_[j]))
          vstat_[j] = VarStatus::at_lower;
        else if (std::isfinite(hi_[j]))
          vstat_[j] = VarStatus::at_upper;
        else
          vstat_[j] = VarStatus::nonbasic_free;
      }
      for (int i = 0; i < m_; ++i) vstat_[n_ + i] = VarStatus::basic;
    }
    head_.clear();
    for (int j = 0; j < ncols_; ++j)
      if (vstat_[j] == VarStatus::basic) head_.push_back(j);
    xval_.resize(ncols_);
    for (int j = 0; j < ncols_; ++j) {
      switch (vstat_[j]) {
        case VarStatus::at_lower: xval_[j] = lo_[j]; break;
        case VarStatus::at_upper: xval_[j] = hi_[j]; break;
        default: xval_[j] = 0.0; break;
      }
    }
    y_cost_.resize(m_);
  }

  void factorize() {
    if (m_ == 0) {
      Binv_.resize(0, 0);
      updates_since_factor_ = 0;
      return;
    }
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
        B(col_row_[p], k) = col_val_[p];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    // a singular basis can only arise from numerical drift; rebuild from
    // the slack basis in that case
    const double rcond_proxy = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (m_ > 0 && (!std::isfinite(rcond_proxy) || rcond_proxy < 1e-13)) {
      for (int j = 0; j < ncols_; ++j)
        if (vstat_[j] == VarStatus::basic)
          vstat_[j] = std::isfinite(lo_[j]) ? VarStatus::at_lower
                     : std::isfinite(hi_[j]) ? VarStatus::at_upper
                                             : VarStatus::nonbasic_free;
      for (int i = 0; i < m_; ++i) vstat_[n_ + i] = VarStatus::basic;
      head_.clear();
      for (int j = 0; j < ncols_; ++j)
        if (vstat_[j] == VarStatus::basic) head_.push_back(j);
      for (int j = 0; j < n_; ++j)
        xval_[j] = vstat_[j] == VarStatus::at_lower   ? lo_[j]
                   : vstat_[j] == VarStatus::at_upper ? hi_[j]
                                                      : 0.0;
      factorize();
      return;
    }
    Binv_ = lu.inverse();
    updates_since_factor_ = 0;
    recompute_basics();
  }

  void recompute_basics() {
    Eigen::VectorXd rhs = b_;
    for (int j = 0; j < ncols_; ++j) {
      if (vstat_[j] == VarStatus::basic || xval_[j] == 0.0) continue;
      for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
        rhs[col_row_[p]] -= col_val_[p] * xval_[j];
    }
    Eigen::VectorXd xb = Binv_ * rhs;
    for (int k = 0; k < m_; ++k) xval_[head_[k]] = xb[k];
  }

  void update_binv(const Eigen::VectorXd& w, int r) {
    const double piv = w[r];
    Eigen::RowVectorXd row_r = Binv_.row(r) / piv;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double wi = w[i];
      if (wi != 0.0) Binv_.row(i) -= wi * row_r;
    }
    Binv_.row(r) = row_r;
  }

  // Standard first-blocking-event ratio test. Returns leave=-1, flip=false
  // when the ray is unblocked.
  void ratio_standard(double dir, const Eigen::VectorXd& w, double own_range,
                      bool phase1, double& step, int& leave,
                      bool& leave_at_upper, bool& flip) const {
    step = own_range;
    leave = -1;
    leave_at_upper = false;
    flip = std::isfinite(own_range);
    for (int i = 0; i < m_; ++i) {
      const double dx = -dir * w[i];
      if (std::abs(dx) <= kRatioTol) continue;
      const int j = head_[i];
      double limit = kInf;
      bool hits_upper = false;
      if (dx < 0) {
        // moving down: an above-upper basic (phase 1) blocks at its upper
        // bound, otherwise the lower bound blocks
        const bool above = phase1 && xval_[j] > hi_[j] + opt_.feas_tol;
        const double target = above ? hi_[j] : lo_[j];
        if (std::isfinite(target)) {
          limit = (xval_[j] - target) / (-dx);
          hits_upper = above;
        }
      } else {
        const bool below = phase1 && xval_[j] < lo_[j] - opt_.feas_tol;
        const double target = below ? lo_[j] : hi_[j];
        if (std::isfinite(target)) {
          limit = (target - xval_[j]) / dx;
          hits_upper = !below;
        }
      }
      if (limit < -kRatioTol) limit = 0.0;
      limit = std::max(limit, 0.0);
      if (limit < step - kRatioTol ||
          (limit < step + kRatioTol && leave >= 0 && i < leave)) {
        if (std::abs(w[i]) > kPivotTol) {
          step = std::min(step, limit);
          leave = i;
          leave_at_upper = hits_upper;
          flip = false;
        }
      }
    }
    if (leave < 0 && flip) step = own_range;
  }

  // Long-step piecewise-linear phase-1 ratio test: pass breakpoints while
  // the infeasibility keeps decreasing. slope0 = d(phi)/d(step) < 0.
  bool ratio_phase1_longstep(int /*q*/, double dir, const Eigen::VectorXd& w,
                             double slope0, double own_range, double& step,
                             int& leave, bool& leave_at_upper,
                             bool& flip) const {
    struct Event {
      double step;
      int pos;        // basis position, or -1 for the entering variable
      bool at_upper;  // bound reached by the blocking variable
      double gain;    // slope increase past this point
    };
    std::vector<Event> events;
    events.reserve(2 * m_ + 1);
    for (int i = 0; i < m_; ++i) {
      const double dx = -dir * w[i];
      if (std::abs(dx) <= kRatioTol) continue;
      const int j = head_[i];
      const double x = xval_[j];
      if (dx < 0) {
        // moving down: may cross upper (if above) then lower
        if (x > hi_[j] + opt_.feas_tol && std::isfinite(hi_[j]))
          events.push_back({(x - hi_[j]) / (-dx), i, true, -dx});
        if (std::isfinite(lo_[j]) && x > lo_[j] - opt_.feas_tol)
          events.push_back({std::max(0.0, (x - lo_[j]) / (-dx)), i, false, -dx});
      } else {
        if (x < lo_[j] - opt_.feas_tol && std::isfinite(lo_[j]))
          events.push_back({(lo_[j] - x) / dx, i, false, dx});
        if (std::isfinite(hi_[j]) && x < hi_[j] + opt_.feas_tol)
          events.push_back({std::max(0.0, (hi_[j] - x) / dx), i, true, dx});
      }
    }
    if (std::isfinite(own_range))
      events.push_back({own_range, -1, false, kInf});
    if (events.empty()) return false;
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.step < b.step; });

    double slope = slope0;
    for (const auto& ev : events) {
      slope += ev.gain;
      if (slope >= -1e-12 || !std::isfinite(ev.gain)) {
        step = ev.step;
        if (ev.pos < 0) { flip = true; leave = -1; return true; }
        // require an acceptable pivot element
        if (std::abs(w[ev.pos]) <= kPivotTol) continue;
        leave = ev.pos;
        leave_at_upper = ev.at_upper;
        flip = false;
        return true;
      }
    }
    // slope never turned nonnegative: blocked only by the last event
    const Event& last = events.back();
    if (last.pos < 0) { step = last.step; flip = true; leave = -1; return true; }
    if (std::abs(w[last.pos]) <= kPivotTol) return false;
    step = last.step;
    leave = last.pos;
    leave_at_upper = last.at_upper;
    flip = false;
    return true;
  }

  void finish(Solution& out, int iter) {
    out.iterations = iter;
    if (updates_since_factor_ > kDriftUpdates) factorize();
    out.primal.resize(n_);
    for (int j = 0; j < n_; ++j) out.primal[j] = xval_[j];
    for (int i = 0; i < m_; ++i) y_cost_[i] = cost_[head_[i]];
    Eigen::VectorXd y = Binv_.transpose() * y_cost_;
    out.row_duals = y;
    out.reduced_costs.resize(n_);
    for (int j = 0; j < n_; ++j)
      out.reduced_costs[j] = cost_[j] - dot_col(j, y);
    out.objective = 0.0;
    for (int j = 0; j < n_; ++j) out.objective += cost_[j] * xval_[j];
    out.vstat = vstat_;
    out.degenerate = false;
    for (int i = 0; i < m_; ++i) {
      const int j = head_[i];
      if ((std::isfinite(lo_[j]) && xval_[j] - lo_[j] < kDegenTol) ||
          (std::isfinite(hi_[j]) && hi_[j] - xval_[j] < kDegenTol)) {
        out.degenerate = true;
        break;
      }
    }
  }

  SimplexOptions opt_;
  int m_, n_, ncols_;
  std::vector<int> col_ptr_, col_row_;
  std::vector<double> col_val_;
  std::vector<double> lo_, hi_, cost_;
  Eigen::VectorXd b_;
  std::vector<int> head_;
  std::vector<VarStatus> vstat_;
  Eigen::VectorXd xval_;
  Eigen::VectorXd y_cost_;
  Eigen::MatrixXd Binv_;
  int updates_since_factor_ = 0;
};

Solution solve_lp(const ConvexProgram& program, const SimplexOptions& options,
                  const std::vector<VarStatus>* hint) {
  Simplex s(program, options);
  return s.run(hint);
}

struct SideGrid {
  std::vector<double> widths; // segment widths, near to far
  std::vector<double> costs;  // $ per unit of segment variable
};

SideGrid make_side_grid(double range, double rho, double focus,
                        double fine_width) {
  SideGrid grid;
  if (range <= 0) return grid;
  std::set<double> pts;
  pts.insert(range);
  for (double f = range * 1e-5; f < range; f *= 2.5) pts.insert(f);
  if (focus > 0 && focus < range && fine_width > 0) {
    for (int k = -6; k <= 6; ++k) {
      const double p = focus + k * fine_width;
      if (p > 0 && p < range) pts.insert(p);
    }
  }
  double prev = 0.0;
  for (double p : pts) {
    const double w = p - prev;
    if (w <= 0) continue;
    grid.widths.push_back(w);
    grid.costs.push_back(rho * (prev + p) / 2.0); // secant slope of rho/2 d^2
    prev = p;
  }
  return grid;
}

Solution solve_prox(const ConvexProgram& program,
                    const SimplexOptions& options) {
  const int n0 = program.num_variables();
  const int m0 = program.num_rows();

  std::vector<double> focus(program.prox_terms.size(), -1.0);
  std::vector<double> fine(program.prox_terms.size(), 0.0);
  Solution best;

  for (int round = 0; round < std::max(1, options.prox_rounds); ++round) {
    ConvexProgram lp;
    lp.lo = program.lo;
    lp.hi = program.hi;
    lp.obj = program.obj;
    lp.rows = program.rows;

    for (std::size_t k = 0; k < program.prox_terms.size(); ++k) {
      const auto& [j, center_raw] = program.prox_terms[k];
      double lo_j = program.lo[j], hi_j = program.hi[j];
      if (!std::isfinite(lo_j)) lo_j = std::min(center_raw, 0.0) - 1e6;
      if (!std::isfinite(hi_j)) hi_j = std::max(center_raw, 0.0) + 1e6;
      const double center = std::clamp(center_raw, lo_j, hi_j);
      if (hi_j - lo_j <= 0) continue;

      std::vector<std::pair<int, double>> balance{{j, 1.0}};
      const SideGrid right = make_side_grid(hi_j - center, program.rho,
                                            focus[k] > 0 ? focus[k] : -1.0,
                                            fine[k]);
      for (std::size_t s = 0; s < right.widths.size(); ++s) {
        const int z = lp.add_variable(0.0, right.widths[s], right.costs[s]);
        balance.emplace_back(z, -1.0);
      }
      const SideGrid left = make_side_grid(center - lo_j, program.rho,
                                           focus[k] < 0 ? -focus[k] : -1.0,
                                           fine[k]);
      for (std::size_t s = 0; s < left.widths.size(); ++s) {
        const int z = lp.add_variable(0.0, left.widths[s], left.costs[s]);
        balance.emplace_back(z, 1.0);
      }
      lp.add_row(RowKind::eq, std::move(balance), center);
    }

    Solution sol = solve_lp(lp, options, nullptr);
    if (sol.status != SolveStatus::optimal) {
      sol.primal.conservativeResize(n0);
      sol.row_duals.conservativeResize(m0);
      return sol;
    }

    for (std::size_t k = 0; k < program.prox_terms.size(); ++k) {
      const auto& [j, center] = program.prox_terms[k];
      const double d = sol.primal[j] - center;
      const double mag = std::abs(d);
      focus[k] = d >= 0 ? mag : -mag;
      fine[k] = std::max(mag / 24.0, 1e-9);
    }
    best = std::move(sol);
  }

  Solution out;
  out.status = best.status;
  out.iterations = best.iterations;
  out.degenerate = best.degenerate;
  out.primal = best.primal.head(n0);
  out.row_duals = best.row_duals.head(m0);
  out.reduced_costs = best.reduced_costs.head(n0);
  out.objective = 0.0;
  for (int j = 0; j < n0; ++j) out.objective += program.obj[j] * out.primal[j];
  for (const auto& [j, center] : program.prox_terms) {
    const double d = out.primal[j] - center;
    out.objective += 0.5 * program.rho * d * d;
  }
  // the expanded basis does not map back to the plain program
  out.vstat.clear();
  return out;
}

} // namespace

Solution solve(const ConvexProgram& program, const SimplexOptions& options) {
  if (program.rho > 0 && !program.prox_terms.empty())
    return solve_prox(program, options);
  return solve_lp(program, options, nullptr);
}

void BasisHint::store(const Solution& solution, const ConvexProgram& program) {
  if (solution.status != SolveStatus::optimal || solution.vstat.empty()) return;
  vstat = solution.vstat;
  num_vars = program.num_variables();
  num_rows = program.num_rows();
}

Solution BasisHint::adapt(const ConvexProgram& program) const {
  Solution hint;
  if (vstat.empty() || program.num_variables() != num_vars ||
      program.num_rows() < num_rows)
    return hint;
  hint.vstat = vstat;
  hint.vstat.resize(static_cast<std::size_t>(program.num_variables()) +
                        program.num_rows(),
                    VarStatus::basic);
  return hint;
}

Solution warm_solve(const ConvexProgram& program, const Solution& hint,
                    const SimplexOptions& options) {
  if (program.rho > 0 && !program.prox_terms.empty())
    return solve_prox(program, options);
  if (hint.vstat.empty()) return solve_lp(program, options, nullptr);
  return solve_lp(program, options, &hint.vstat);
}

struct ResolveSession::Impl {
  Simplex simplex;
  bool solved = false;
  Impl(const ConvexProgram& program, const SimplexOptions& options)
      : simplex(program, options) {}
};

ResolveSession::ResolveSession(const ConvexProgram& program,
                               const SimplexOptions& options) {
  if (program.rho > 0 && !program.prox_terms.empty())
    throw std::invalid_argument("ResolveSession: proximal programs unsupported");
  impl_ = std::make_unique<Impl>(program, options);
}

ResolveSession::~ResolveSession() = default;
ResolveSession::ResolveSession(ResolveSession&&) noexcept = default;
ResolveSession& ResolveSession::operator=(ResolveSession&&) noexcept = default;

void ResolveSession::set_rhs(int row, double value) {
  impl_->simplex.set_rhs(row, value);
}

void ResolveSession::set_variable_bounds(int var, double lower, double upper) {
  impl_->simplex.set_variable_bounds(var, lower, upper);
}

void ResolveSession::append_row(
    RowKind kind, const std::vector<std::pair<int, double>>& coeffs,
    double rhs) {
  impl_->simplex.append_row(kind, coeffs, rhs);
}

Solution ResolveSession::solve(const std::vector<VarStatus>* hint) {
  if (!impl_->solved) {
    impl_->solved = true;
    return impl_->simplex.run(hint);
  }
  return impl_->simplex.rerun();
}

double dual_objective(const ConvexProgram& program, const Solution& solution) {
  double obj = 0.0;
  for (int i = 0; i < program.num_rows(); ++i)
    obj += solution.row_duals[i] * program.rows[i].rhs;
  for (int j = 0; j < program.num_variables(); ++j) {
    if (solution.vstat.empty() || solution.vstat[j] == VarStatus::basic)
      continue;
    const double x = solution.vstat[j] == VarStatus::at_lower ? program.lo[j]
                     : solution.vstat[j] == VarStatus::at_upper
                         ? program.hi[j]
                         : 0.0;
    obj += solution.reduced_costs[j] * x;
  }
  return obj;
}

void write_lp_format(const ConvexProgram& program, std::ostream& os) {
  os << "\\ gridvfa convex program dump\n";
  if (program.rho > 0)
    os << "\\ note: diagonal proximal term rho=" << program.rho
       << " omitted from the LP body\n";
  os << "Minimize\n obj:";
  bool first = true;
  for (int j = 0; j < program.num_variables(); ++j) {
    if (program.obj[j] == 0.0) continue;
    os << (first ? " " : (program.obj[j] >= 0 ? " + " : " "))
       << program.obj[j] << " x" << j;
    first = false;
  }
  if (first) os << " 0 x0";
  os << "\nSubject To\n";
  for (int i = 0; i < program.num_rows(); ++i) {
    const auto& row = program.rows[i];
    os << " r" << i << ":";
    for (const auto& [j, a] : row.coeffs)
      os << (a >= 0 ? " + " : " ") << a << " x" << j;
    switch (row.kind) {
      case RowKind::eq: os << " = "; break;
      case RowKind::le: os << " <= "; break;
      case RowKind::ge: os << " >= "; break;
    }
    os << row.rhs << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < program.num_variables(); ++j) {
    const double l = program.lo[j], h = program.hi[j];
    if (!std::isfinite(l) && !std::isfinite(h))
      os << " x" << j << " free\n";
    else if (!std::isfinite(h))
      os << " x" << j << " >= " << l << "\n";
    else if (!std::isfinite(l))
      os << " x" << j << " <= " << h << "\n";
    else
      os << " " << l << " <= x" << j << " <= " << h << "\n";
  }
  os << "End\n";
}

} // namespace gridvfa
