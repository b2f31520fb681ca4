#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nrg/symbol.hpp"

namespace nrg {

// Inner half of a branching pair: an ordered list of expansions, one per
// derivation of the paired outer nonterminal (duplicates allowed). When
// fixed_len is set every expansion has exactly that length.
struct InnerRule {
    std::vector<SymbolSeq> expansions;
    std::optional<int32_t> fixed_len;
};

// A rule body is either a plain symbol sequence (which may reference at most
// one inner nonterminal, making it the outer half of a branching pair) or an
// inner expansion list.
struct Rule {
    std::variant<SymbolSeq, InnerRule> body;

    bool is_inner() const { return std::holds_alternative<InnerRule>(body); }
    SymbolSeq& plain() { return std::get<SymbolSeq>(body); }
    const SymbolSeq& plain() const { return std::get<SymbolSeq>(body); }
    InnerRule& inner() { return std::get<InnerRule>(body); }
    const InnerRule& inner() const { return std::get<InnerRule>(body); }

    static Rule make_plain(SymbolSeq s) { return Rule{std::move(s)}; }
    static Rule make_inner(std::vector<SymbolSeq> exps, std::optional<int32_t> fixed_len) {
        return Rule{InnerRule{std::move(exps), fixed_len}};
    }
};

// Read-only view of a branching pair: outer -> prefix I suffix.
struct BranchingView {
    int32_t outer = -1;
    int32_t inner = -1;
    std::span<const Symbol> prefix;
    std::span<const Symbol> suffix;
};

struct Violation {
    enum class Kind {
        MissingStart,
        EmptyBody,
        EmptyExpansion,
        DanglingReference,
        Cycle,
        Unreachable,
        InnerRefCount,       // inner nonterminal not referenced exactly once from a plain body
        MultipleInnerRefs,   // a plain body references more than one inner nonterminal
        EmptyAffix,          // branching prefix or suffix empty
        ExpansionCount,      // expansion list length != derivations of the outer
        FixedLenMismatch,
        SeparatorInBody,
    };
    Kind kind;
    int32_t rule;
    std::string detail;
};

// Size accounting for one grammar under one encoding. `total` always equals
// the length of the encoded symbol stream. `cost_s` is the share of the inner
// rules spent on re-listing expansions beyond one listing per distinct
// expansion, i.e. the disambiguation cost of the target sequence.
struct SizeReport {
    int64_t rule_symbols = 0;        // sum of |body|+1 over plain rules
    int64_t branching_overhead = 0;  // encoded cost of all inner rules
    int64_t cost_s = 0;
    int64_t total = 0;
};

// Non-recursive context-free grammar. Rule ids are dense, rule 0 is the
// start symbol. Immutable by convention: operations build new grammars.
struct Grammar {
    AlphabetMode mode = AlphabetMode::Byte;
    std::vector<Rule> rules;
    TokenTable tokens;  // token mode only

    int32_t n_rules() const { return static_cast<int32_t>(rules.size()); }
    const Rule& rule(int32_t id) const { return rules.at(static_cast<size_t>(id)); }

    static Grammar single_rule(const Sequence& s) {
        Grammar g;
        g.mode = s.mode;
        g.tokens = s.tokens;
        g.rules.push_back(Rule::make_plain(s.syms));
        return g;
    }
};

std::string violation_to_string(const Violation& v);

// Structural validation; empty result iff all grammar invariants hold.
std::vector<Violation> validate(const Grammar& g);

// Maximal depth of a nonterminal over all parse trees, i.e. longest path
// from the start symbol in the reference DAG. Throws std::out_of_range for
// unknown ids, std::invalid_argument on cyclic grammars.
int32_t depth(const Grammar& g, int32_t nonterminal);
std::vector<int32_t> depths(const Grammar& g);

// Number of times each nonterminal is derived when expanding the start
// symbol once. Occurrences in a plain body count once per derivation of its
// head; each listed expansion of an inner rule is consumed exactly once.
std::vector<int64_t> derivation_counts(const Grammar& g);

bool is_straight_line(const Grammar& g);

// Rules in stream emission order: ascending depth (ties by id), with every
// inner rule pinned immediately after the rule that references it. In this
// order every nonterminal occurrence precedes its defining rule.
std::vector<int32_t> emission_order(const Grammar& g);

// Same grammar with rules renumbered to emission order (start stays 0).
Grammar canonicalized(const Grammar& g);

// Branching view of the outer rule `outer_id`; nullopt when the rule body
// references no inner nonterminal.
std::optional<BranchingView> branching(const Grammar& g, int32_t outer_id);

// Supplies expansion indices per inner rule. The canonical resolver consumes
// expansions in stored order, which matches outer occurrences in a leftmost
// derivation.
class ChoiceResolver {
public:
    virtual ~ChoiceResolver() = default;
    // Next expansion index for inner rule `inner_id`.
    virtual size_t next(int32_t inner_id) = 0;
};

// Expands the start symbol to the unique terminal sequence selected by the
// resolver. Throws if the resolver exhausts or oversupplies any expansion
// list relative to the derivation.
SymbolSeq expand(const Grammar& g, ChoiceResolver& resolver);

// Expansion under the canonical resolver (the encoded target sequence).
SymbolSeq expand(const Grammar& g);

// Expansion with an explicit per-inner permutation of expansion indices.
SymbolSeq expand_permuted(const Grammar& g, const std::vector<std::vector<size_t>>& order);

// Exact size of the grammar under the given encoding. Throws
// std::invalid_argument when a fixed encoding is requested but some inner
// rule has no fixed_len.
SizeReport size(const Grammar& g, Encoding enc);

}  // namespace nrg
