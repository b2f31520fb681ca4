#include "nrg/repeat_index.hpp"

#include <algorithm>
#include <stdexcept>

namespace nrg {

std::vector<int32_t> suffix_array(const std::vector<int32_t>& text) {
    const int32_t n = static_cast<int32_t>(text.size());
    std::vector<int32_t> sa(static_cast<size_t>(n));
    if (n == 0) return sa;

    // Initial ranks by coordinate compression.
    std::vector<int32_t> sorted(text);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int32_t> rank(static_cast<size_t>(n));
    for (int32_t i = 0; i < n; ++i)
        rank[static_cast<size_t>(i)] = static_cast<int32_t>(
            std::lower_bound(sorted.begin(), sorted.end(), text[static_cast<size_t>(i)]) -
            sorted.begin());
    int32_t classes = static_cast<int32_t>(sorted.size());

    std::vector<int32_t> cnt(static_cast<size_t>(std::max(classes, n)) + 1, 0);
    std::vector<int32_t> sa2(static_cast<size_t>(n)), rank2(static_cast<size_t>(n));

    // Stable counting sort of sa2 (pre-ordered by second key) by rank.
    auto counting_sort = [&]() {
        std::fill(cnt.begin(), cnt.begin() + classes + 1, 0);
        for (int32_t i = 0; i < n; ++i) ++cnt[static_cast<size_t>(rank[static_cast<size_t>(i)]) + 1];
        for (int32_t i = 0; i < classes; ++i) cnt[static_cast<size_t>(i) + 1] += cnt[static_cast<size_t>(i)];
        for (int32_t j = 0; j < n; ++j) {
            int32_t i = sa2[static_cast<size_t>(j)];
            sa[static_cast<size_t>(cnt[static_cast<size_t>(rank[static_cast<size_t>(i)])]++)] = i;
        }
    };

    for (int32_t i = 0; i < n; ++i) sa2[static_cast<size_t>(i)] = i;
    counting_sort();

    for (int32_t k = 1; classes < n; k <<= 1) {
        // Order by second key: suffixes without one come first, the rest in
        // the order of the previous round shifted by k.
        int32_t at = 0;
        for (int32_t i = n - k; i < n; ++i) sa2[static_cast<size_t>(at++)] = i;
        for (int32_t j = 0; j < n; ++j)
            if (sa[static_cast<size_t>(j)] >= k) sa2[static_cast<size_t>(at++)] = sa[static_cast<size_t>(j)] - k;
        counting_sort();

        auto key2 = [&](int32_t i) { return i + k < n ? rank[static_cast<size_t>(i + k)] : -1; };
        rank2[static_cast<size_t>(sa[0])] = 0;
        for (int32_t j = 1; j < n; ++j) {
            int32_t a = sa[static_cast<size_t>(j - 1)], b = sa[static_cast<size_t>(j)];
            bool same = rank[static_cast<size_t>(a)] == rank[static_cast<size_t>(b)] && key2(a) == key2(b);
            rank2[static_cast<size_t>(b)] = rank2[static_cast<size_t>(a)] + (same ? 0 : 1);
        }
        std::swap(rank, rank2);
        classes = rank[static_cast<size_t>(sa[static_cast<size_t>(n - 1)])] + 1;
    }
    return sa;
}

std::vector<int32_t> lcp_array(const std::vector<int32_t>& text,
                               const std::vector<int32_t>& sa) {
    const int32_t n = static_cast<int32_t>(text.size());
    std::vector<int32_t> lcp(static_cast<size_t>(n), 0);
    if (n == 0) return lcp;
    std::vector<int32_t> inv(static_cast<size_t>(n));
    for (int32_t i = 0; i < n; ++i) inv[static_cast<size_t>(sa[static_cast<size_t>(i)])] = i;
    int32_t h = 0;
    for (int32_t i = 0; i < n; ++i) {
        if (inv[static_cast<size_t>(i)] == 0) {
            h = 0;
            continue;
        }
        int32_t j = sa[static_cast<size_t>(inv[static_cast<size_t>(i)] - 1)];
        if (h > 0) --h;
        while (i + h < n && j + h < n &&
               text[static_cast<size_t>(i + h)] == text[static_cast<size_t>(j + h)])
            ++h;
        lcp[static_cast<size_t>(inv[static_cast<size_t>(i)])] = h;
    }
    return lcp;
}

RepeatIndex::RepeatIndex(const Grammar& g) {
    int32_t sentinel = kSentinelBase;
    auto open_doc = [&](int32_t rule, int32_t part) {
        doc_start_.push_back(static_cast<int32_t>(text_.size()));
        doc_where_.push_back({rule, part, 0});
    };
    auto close_doc = [&]() { text_.push_back(--sentinel); };

    for (int32_t r = 0; r < g.n_rules(); ++r) {
        const Rule& rule = g.rules[static_cast<size_t>(r)];
        if (rule.is_inner()) {
            if (rule.inner().fixed_len) continue;
            for (size_t j = 0; j < rule.inner().expansions.size(); ++j) {
                open_doc(r, static_cast<int32_t>(j));
                for (Symbol s : rule.inner().expansions[j]) text_.push_back(s.raw());
                close_doc();
            }
        } else {
            open_doc(r, -1);
            for (Symbol s : rule.plain()) text_.push_back(s.raw());
            close_doc();
        }
    }
    sa_ = suffix_array(text_);
    lcp_ = lcp_array(text_, sa_);
}

RepeatIndex::RepeatIndex(const Grammar& g, const std::vector<int32_t>& rule_subset) {
    int32_t sentinel = kSentinelBase;
    for (int32_t r : rule_subset) {
        const Rule& rule = g.rules.at(static_cast<size_t>(r));
        if (rule.is_inner()) continue;
        doc_start_.push_back(static_cast<int32_t>(text_.size()));
        doc_where_.push_back({r, -1, 0});
        for (Symbol s : rule.plain()) text_.push_back(s.raw());
        text_.push_back(--sentinel);
    }
    sa_ = suffix_array(text_);
    lcp_ = lcp_array(text_, sa_);
}

Located RepeatIndex::locate(size_t pos) const {
    auto it = std::upper_bound(doc_start_.begin(), doc_start_.end(), static_cast<int32_t>(pos));
    size_t doc = static_cast<size_t>(it - doc_start_.begin()) - 1;
    Located loc = doc_where_[doc];
    loc.offset = static_cast<int32_t>(pos) - doc_start_[doc];
    return loc;
}

SymbolSeq RepeatIndex::word_at(int32_t pos, int32_t len) const {
    SymbolSeq w;
    w.reserve(static_cast<size_t>(len));
    for (int32_t i = 0; i < len; ++i)
        w.push_back(Symbol::from_raw(text_[static_cast<size_t>(pos + i)]));
    return w;
}

std::vector<int32_t> RepeatIndex::select_nonoverlap(std::vector<int32_t> positions, int32_t len) {
    std::sort(positions.begin(), positions.end());
    std::vector<int32_t> out;
    int64_t next_free = -1;
    for (int32_t p : positions) {
        if (p >= next_free) {
            out.push_back(p);
            next_free = static_cast<int64_t>(p) + len;
        }
    }
    return out;
}

std::vector<RepeatIndex::Candidate> RepeatIndex::repeat_candidates() const {
    // Bottom-up lcp-interval enumeration. Every lcp interval is a
    // right-maximal word; left-maximality is an O(1) range check over the
    // preceding-symbol array, where positions at a document start get a
    // value unique to them (a boundary never equals anything).
    std::vector<Candidate> out;
    const int32_t n = static_cast<int32_t>(text_.size());
    if (n < 2) return out;

    std::vector<int64_t> prev(static_cast<size_t>(n));
    for (int32_t j = 0; j < n; ++j) {
        int32_t p = sa_[static_cast<size_t>(j)];
        if (p == 0 || text_[static_cast<size_t>(p - 1)] < kSentinelBase)
            prev[static_cast<size_t>(j)] = INT64_MIN / 2 + j;
        else
            prev[static_cast<size_t>(j)] = text_[static_cast<size_t>(p - 1)];
    }
    std::vector<int32_t> brk(static_cast<size_t>(n), 0);
    for (int32_t j = 1; j < n; ++j)
        brk[static_cast<size_t>(j)] =
            brk[static_cast<size_t>(j - 1)] +
            (prev[static_cast<size_t>(j)] != prev[static_cast<size_t>(j - 1)] ? 1 : 0);
    auto left_diverse = [&](int32_t lb, int32_t rb) {
        return brk[static_cast<size_t>(rb - 1)] != brk[static_cast<size_t>(lb)];
    };

    struct Open {
        int32_t lcp;
        int32_t lb;
    };
    std::vector<Open> stack{{0, 0}};
    for (int32_t i = 1; i <= n; ++i) {
        const int32_t l = i < n ? lcp_[static_cast<size_t>(i)] : 0;
        int32_t lb = i - 1;
        while (stack.back().lcp > l) {
            Open ent = stack.back();
            stack.pop_back();
            if (ent.lcp >= 2 && left_diverse(ent.lb, i)) {
                int32_t lo = std::max(l, stack.back().lcp) + 1;
                out.push_back({ent.lcp, std::max(lo, 2), ent.lb, i});
            }
            lb = ent.lb;
        }
        if (l > stack.back().lcp) stack.push_back({l, lb});
    }
    return out;
}

RepeatStats RepeatIndex::stats_for(const Candidate& c) const {
    std::vector<int32_t> positions(sa_.begin() + c.lb, sa_.begin() + c.rb);
    std::vector<int32_t> picked = select_nonoverlap(std::move(positions), c.len);
    RepeatStats st;
    st.word = word_at(sa_[static_cast<size_t>(c.lb)], c.len);
    st.occ = static_cast<int64_t>(picked.size());
    st.positions.reserve(picked.size());
    for (int32_t p : picked) st.positions.push_back(locate(static_cast<size_t>(p)));
    return st;
}

std::vector<RepeatStats> RepeatIndex::maximal_repeats() const {
    std::vector<RepeatStats> out;
    for (const Candidate& c : repeat_candidates()) {
        RepeatStats st = stats_for(c);
        if (st.occ >= 2) out.push_back(std::move(st));
    }
    std::sort(out.begin(), out.end(),
              [](const RepeatStats& a, const RepeatStats& b) { return seq_less(a.word, b.word); });
    return out;
}

int64_t RepeatIndex::maximal_repeat_count() const {
    int64_t n = 0;
    for (const Candidate& c : repeat_candidates()) {
        // Two non-overlapping occurrences exist iff the extreme positions
        // are at least len apart; no sorting needed.
        int32_t mn = INT32_MAX, mx = INT32_MIN;
        for (int32_t i = c.lb; i < c.rb; ++i) {
            mn = std::min(mn, sa_[static_cast<size_t>(i)]);
            mx = std::max(mx, sa_[static_cast<size_t>(i)]);
        }
        if (mx - mn >= c.len) ++n;
    }
    return n;
}

std::vector<int32_t> RepeatIndex::all_positions(const SymbolSeq& word) const {
    if (word.empty()) throw std::invalid_argument("all_positions: empty word");
    const int32_t n = static_cast<int32_t>(text_.size());
    const int32_t m = static_cast<int32_t>(word.size());

    // sa range of suffixes starting with `word`.
    auto cmp_at = [&](int32_t suf) {
        // -1: suffix < word, 0: prefix match, 1: suffix > word
        for (int32_t i = 0; i < m; ++i) {
            if (suf + i >= n) return -1;
            int32_t a = text_[static_cast<size_t>(suf + i)];
            int32_t b = word[static_cast<size_t>(i)].raw();
            if (a != b) return a < b ? -1 : 1;
        }
        return 0;
    };
    int32_t lo = 0, hi = n;
    while (lo < hi) {
        int32_t mid = lo + (hi - lo) / 2;
        if (cmp_at(sa_[static_cast<size_t>(mid)]) < 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    int32_t lb = lo;
    hi = n;
    while (lo < hi) {
        int32_t mid = lo + (hi - lo) / 2;
        if (cmp_at(sa_[static_cast<size_t>(mid)]) <= 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    std::vector<int32_t> positions(sa_.begin() + lb, sa_.begin() + lo);
    std::sort(positions.begin(), positions.end());
    return positions;
}

RepeatStats RepeatIndex::occ_nonoverlap(const SymbolSeq& word) const {
    std::vector<int32_t> picked =
        select_nonoverlap(all_positions(word), static_cast<int32_t>(word.size()));
    RepeatStats st;
    st.word = word;
    st.occ = static_cast<int64_t>(picked.size());
    for (int32_t p : picked) st.positions.push_back(locate(static_cast<size_t>(p)));
    return st;
}

std::optional<std::pair<RepeatStats, int64_t>> RepeatIndex::best_repeat() const {
    std::vector<Candidate> cands = repeat_candidates();
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        int64_t ba = repeat_gain(a.len, a.rb - a.lb);
        int64_t bb = repeat_gain(b.len, b.rb - b.lb);
        if (ba != bb) return ba > bb;
        return a.len > b.len;
    });

    std::optional<RepeatStats> best;
    int64_t best_gain = 0;  // only positive gains qualify
    std::vector<int32_t> positions;
    for (const Candidate& c : cands) {
        const int64_t width = c.rb - c.lb;
        int64_t bound = repeat_gain(c.len, width);
        if (bound < best_gain || bound <= 0) break;

        positions.assign(sa_.begin() + c.lb, sa_.begin() + c.rb);
        std::sort(positions.begin(), positions.end());

        // Greedy non-overlap count at word length len.
        auto count_at = [&](int32_t len) {
            int64_t cnt = 0;
            int64_t next_free = INT64_MIN;
            for (int32_t p : positions) {
                if (p >= next_free) {
                    ++cnt;
                    next_free = static_cast<int64_t>(p) + len;
                }
            }
            return cnt;
        };

        // Lengths worth probing inside this interval: the full word, plus,
        // when self-overlap lowers the count, every distinct gap between
        // consecutive occurrences (the count is piecewise constant in the
        // length with breaks right past each gap).
        std::vector<int32_t> lens{c.len};
        if (count_at(c.len) < width) {
            for (size_t j = 1; j < positions.size(); ++j) {
                int32_t gap = positions[j] - positions[j - 1];
                if (gap >= c.lo && gap < c.len) lens.push_back(gap);
            }
            std::sort(lens.begin(), lens.end());
            lens.erase(std::unique(lens.begin(), lens.end()), lens.end());
        }

        for (int32_t len : lens) {
            int64_t occ = count_at(len);
            if (occ < 2) continue;
            int64_t gain = repeat_gain(len, occ);
            if (gain <= 0 || gain < best_gain) continue;
            SymbolSeq word = word_at(positions.empty() ? 0 : sa_[static_cast<size_t>(c.lb)], len);
            if (best && gain == best_gain &&
                !(word.size() > best->word.size() ||
                  (word.size() == best->word.size() && seq_less(word, best->word))))
                continue;
            RepeatStats st;
            st.word = std::move(word);
            st.occ = occ;
            int64_t next_free = INT64_MIN;
            for (int32_t p : positions) {
                if (p >= next_free) {
                    st.positions.push_back(locate(static_cast<size_t>(p)));
                    next_free = static_cast<int64_t>(p) + len;
                }
            }
            best = std::move(st);
            best_gain = gain;
        }
    }
    if (!best) return std::nullopt;
    return std::make_pair(std::move(*best), best_gain);
}

std::vector<RepeatStats> maximal_repeats(const Grammar& g) {
    return RepeatIndex(g).maximal_repeats();
}

RepeatStats occ_nonoverlap(const Grammar& g, const SymbolSeq& w) {
    return RepeatIndex(g).occ_nonoverlap(w);
}

std::optional<std::pair<RepeatStats, int64_t>> best_repeat(const Grammar& g) {
    return RepeatIndex(g).best_repeat();
}

}  // namespace nrg
