#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "robustcp/error.hpp"
#include "robustcp/estimators.hpp"

namespace robustcp {

// Count, sum and sum of squares of a run of order statistics, taken relative
// to OrderStatisticIndex::shift().
struct WindowMoments {
    std::size_t count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
};

// Insert-only multiset over a universe of values known up front, with rank
// queries and windowed moment sums in O(log U).
//
// Values are coordinate-compressed onto a segment tree over the sorted
// distinct universe. Each node keeps the count, sum and sum of squares of the
// values in its slot range. Moments are stored relative to the universe median
// so that windowed variances lose little to cancellation, and window sums only
// ever touch nodes inside the window, never the (possibly huge) tails.
class OrderStatisticIndex {
public:
    explicit OrderStatisticIndex(std::span<const double> universe)
        : distinct_(universe.begin(), universe.end()) {
        std::sort(distinct_.begin(), distinct_.end());
        distinct_.erase(std::unique(distinct_.begin(), distinct_.end()), distinct_.end());
        if (!universe.empty()) {
            shift_ = detail::median(universe);
        }
        leaves_ = 1;
        while (leaves_ < distinct_.size()) {
            leaves_ <<= 1;
        }
        count_.assign(2 * leaves_, 0);
        sum_.assign(2 * leaves_, 0.0);
        sum_sq_.assign(2 * leaves_, 0.0);
    }

    void insert(double value) {
        const auto it = std::lower_bound(distinct_.begin(), distinct_.end(), value);
        if (it == distinct_.end() || *it != value) {
            fail(ErrorCode::InvalidParameter, "value is not part of the index universe");
        }
        const double d = value - shift_;
        for (std::size_t node = leaves_ + static_cast<std::size_t>(it - distinct_.begin()); node >= 1; node >>= 1) {
            count_[node] += 1;
            sum_[node] += d;
            sum_sq_[node] += d * d;
        }
        ++size_;
    }

    std::size_t size() const noexcept { return size_; }
    double shift() const noexcept { return shift_; }

    // k-th smallest inserted value, zero-based.
    double kth(std::size_t k) const { return distinct_[locate(k).slot]; }

    double median() const {
        if (size_ == 0) {
            fail(ErrorCode::EmptySample, "median of an empty index");
        }
        const std::size_t mid = size_ / 2;
        if (size_ % 2 == 1) {
            return kth(mid);
        }
        return detail::middle(kth(mid - 1), kth(mid));
    }

    // Moments of the order statistics with zero-based ranks in [window.lo, window.hi).
    WindowMoments window_moments(OrderWindow window) const {
        WindowMoments out;
        if (window.hi <= window.lo) {
            return out;
        }
        const Located first = locate(window.lo);
        const Located last = locate(window.hi - 1);
        const auto add_copies = [&](std::size_t slot, std::size_t copies) {
            const double d = distinct_[slot] - shift_;
            out.count += copies;
            out.sum += static_cast<double>(copies) * d;
            out.sum_sq += static_cast<double>(copies) * d * d;
        };
        if (first.slot == last.slot) {
            add_copies(first.slot, window.size());
            return out;
        }
        add_copies(first.slot, first.before + count_[leaves_ + first.slot] - window.lo);
        std::size_t l = leaves_ + first.slot + 1;
        std::size_t r = leaves_ + last.slot;
        while (l < r) {
            if (l & 1U) {
                accumulate(l++, out);
            }
            if (r & 1U) {
                accumulate(--r, out);
            }
            l >>= 1;
            r >>= 1;
        }
        add_copies(last.slot, window.hi - last.before);
        return out;
    }

private:
    struct Located {
        std::size_t slot;
        std::size_t before; // inserted values in slots strictly below `slot`
    };

    Located locate(std::size_t k) const {
        if (k >= size_) {
            fail(ErrorCode::IndexOutOfRange, "order statistic rank beyond index size");
        }
        std::size_t node = 1;
        std::size_t remaining = k;
        while (node < leaves_) {
            const std::size_t left = 2 * node;
            if (count_[left] > remaining) {
                node = left;
            } else {
                remaining -= count_[left];
                node = left + 1;
            }
        }
        return {node - leaves_, k - remaining};
    }

    void accumulate(std::size_t node, WindowMoments& out) const {
        out.count += count_[node];
        out.sum += sum_[node];
        out.sum_sq += sum_sq_[node];
    }

    std::vector<double> distinct_;
    double shift_ = 0.0;
    std::size_t leaves_ = 1;
    std::size_t size_ = 0;
    std::vector<std::size_t> count_;
    std::vector<double> sum_;
    std::vector<double> sum_sq_;
};

} // namespace robustcp
