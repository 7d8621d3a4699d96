#include "taxeval/kendall.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "taxeval/error.hpp"

namespace taxeval {
namespace {

// Sum over runs of equal values in a sorted sequence.
template <typename Eq, typename F>
void for_each_run(std::size_t n, Eq&& equal, F&& f) {
  std::size_t start = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i == n || !equal(i - 1, i)) {
      f(static_cast<std::int64_t>(i - start));
      start = i;
    }
  }
}

std::int64_t pairs_of(std::int64_t t) { return t * (t - 1) / 2; }

// Merge sort by y, counting inversions.
std::int64_t sort_count_swaps(std::vector<double>& y, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = sort_count_swaps(y, buf, lo, mid) + sort_count_swaps(y, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (y[j] < y[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = y[j++];
    } else {
      buf[k++] = y[i++];
    }
  }
  while (i < mid) buf[k++] = y[i++];
  while (j < hi) buf[k++] = y[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            y.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

void check_input(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw InputError("kendall tau: length mismatch (" + std::to_string(xs.size()) + " vs " +
                     std::to_string(ys.size()) + ")");
  }
  if (xs.size() < 2) throw InputError("kendall tau: need at least 2 observations");
  auto is_nan = [](double v) { return std::isnan(v); };
  if (std::any_of(xs.begin(), xs.end(), is_nan) || std::any_of(ys.begin(), ys.end(), is_nan)) {
    throw InputError("kendall tau: NaN in input");
  }
}

struct TieSums {
  double t1 = 0;  // sum t(t-1)
  double t2 = 0;  // sum t(t-1)(t-2)
  double t3 = 0;  // sum t(t-1)(2t+5)

  void add(std::int64_t t) {
    const double d = static_cast<double>(t);
    t1 += d * (d - 1);
    t2 += d * (d - 1) * (d - 2);
    t3 += d * (d - 1) * (2 * d + 5);
  }
};

}  // namespace

KendallCounts kendall_counts(std::span<const double> xs, std::span<const double> ys) {
  check_input(xs, ys);
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return xs[a] != xs[b] ? xs[a] < xs[b] : ys[a] < ys[b];
  });

  KendallCounts c;
  c.pairs = pairs_of(static_cast<std::int64_t>(n));
  for_each_run(n, [&](std::size_t a, std::size_t b) { return xs[order[a]] == xs[order[b]]; },
               [&](std::int64_t t) { c.tied_x += pairs_of(t); });
  for_each_run(
      n,
      [&](std::size_t a, std::size_t b) {
        return xs[order[a]] == xs[order[b]] && ys[order[a]] == ys[order[b]];
      },
      [&](std::int64_t t) { c.tied_xy += pairs_of(t); });

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = ys[order[i]];
  std::vector<double> buf(n);
  c.discordant = sort_count_swaps(y, buf, 0, n);
  for_each_run(n, [&](std::size_t a, std::size_t b) { return y[a] == y[b]; },
               [&](std::int64_t t) { c.tied_y += pairs_of(t); });
  return c;
}

KendallResult kendall_tau(std::span<const double> xs, std::span<const double> ys) {
  const KendallCounts c = kendall_counts(xs, ys);
  const auto nx = c.pairs - c.tied_x;
  const auto ny = c.pairs - c.tied_y;
  if (nx == 0 || ny == 0) throw UndefinedMeasure("kendall tau-b is undefined: one of the lists is constant");

  KendallResult r;
  r.n = xs.size();
  const double s = static_cast<double>(c.concordant_minus_discordant());
  r.tau = s / std::sqrt(static_cast<double>(nx) * static_cast<double>(ny));
  r.tau = std::clamp(r.tau, -1.0, 1.0);

  std::vector<double> sx(xs.begin(), xs.end());
  std::vector<double> sy(ys.begin(), ys.end());
  std::sort(sx.begin(), sx.end());
  std::sort(sy.begin(), sy.end());
  TieSums tx, ty;
  for_each_run(sx.size(), [&](std::size_t a, std::size_t b) { return sx[a] == sx[b]; },
               [&](std::int64_t t) { tx.add(t); });
  for_each_run(sy.size(), [&](std::size_t a, std::size_t b) { return sy[a] == sy[b]; },
               [&](std::int64_t t) { ty.add(t); });
  const double dn = static_cast<double>(r.n);
  const double m = dn * (dn - 1);
  double var = (m * (2 * dn + 5) - tx.t3 - ty.t3) / 18 + tx.t1 * ty.t1 / (2 * m);
  if (r.n > 2) var += tx.t2 * ty.t2 / (9 * m * (dn - 2));
  r.p_value = var > 0 ? std::erfc(std::abs(s) / std::sqrt(var) / std::sqrt(2.0)) : std::nan("");
  return r;
}

}  // namespace taxeval
