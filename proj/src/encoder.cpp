#include "nrg/encoder.hpp"

#include <fstream>

namespace nrg {

namespace {

SymbolSeq remap(const SymbolSeq& in, const std::vector<int32_t>& new_id) {
    SymbolSeq out;
    out.reserve(in.size());
    for (Symbol s : in)
        out.push_back(s.is_nonterminal()
                          ? Symbol::nonterminal(new_id[static_cast<size_t>(s.nt_id())])
                          : s);
    return out;
}

}  // namespace

EncodedStream encode(const Grammar& g, Encoding enc) {
    EncodedStream out;
    out.encoding = enc;
    out.mode = g.mode;
    out.tokens = g.tokens;

    const std::vector<int32_t> order = emission_order(g);
    std::vector<int32_t> new_id(static_cast<size_t>(g.n_rules()), -1);
    for (size_t pos = 0; pos < order.size(); ++pos)
        new_id[static_cast<size_t>(order[pos])] = static_cast<int32_t>(pos);

    for (int32_t old : order) {
        const Rule& r = g.rules[static_cast<size_t>(old)];
        if (!r.is_inner()) {
            SymbolSeq body = remap(r.plain(), new_id);
            out.symbols.insert(out.symbols.end(), body.begin(), body.end());
            out.symbols.push_back(Symbol::rule_sep());
            continue;
        }
        const InnerRule& ir = r.inner();
        if (enc == Encoding::Fixed && !ir.fixed_len)
            throw std::invalid_argument(
                "encode: fixed encoding requested but rule " + std::to_string(old) +
                " has variable-length expansions");
        for (size_t j = 0; j < ir.expansions.size(); ++j) {
            if (enc == Encoding::Variable && j > 0) out.symbols.push_back(Symbol::choice_sep());
            if (enc == Encoding::Fixed && j == 1) out.symbols.push_back(Symbol::choice_sep());
            SymbolSeq e = remap(ir.expansions[j], new_id);
            out.symbols.insert(out.symbols.end(), e.begin(), e.end());
        }
        if (enc == Encoding::Variable) {
            out.symbols.push_back(Symbol::rule_sep());
        } else if (ir.expansions.size() == 1) {
            // Single listing still needs the separator that declares the
            // expansion length.
            out.symbols.push_back(Symbol::choice_sep());
        }
    }
    return out;
}

int64_t stream_length(const Grammar& g, Encoding enc) { return size(g, enc).total; }

DecodeResult decode(const EncodedStream& stream) {
    const SymbolSeq& syms = stream.symbols;
    const size_t n = syms.size();

    Grammar g;
    g.mode = stream.mode;
    g.tokens = stream.tokens;

    std::vector<int64_t> dcount;   // derivations of each (future) rule id
    std::vector<int64_t> dvalue;   // frozen derivation count per decoded rule
    int32_t max_ref = -1;

    auto ensure = [&](int32_t id) {
        if (static_cast<size_t>(id) >= dcount.size()) dcount.resize(static_cast<size_t>(id) + 1, 0);
    };

    size_t cursor = 0;
    while (cursor < n) {
        const int32_t r = g.n_rules();

        // Locate the first separator; its kind decides the rule format.
        size_t sep = cursor;
        while (sep < n && !syms[sep].is_separator()) ++sep;

        ensure(r);
        const int64_t deriv = (r == 0) ? 1 : dcount[static_cast<size_t>(r)];
        if (r > 0 && deriv == 0)
            throw DecodeError(cursor, "rule " + std::to_string(r) + " is never referenced");

        auto note_ref = [&](Symbol s, size_t at, int64_t weight) {
            if (!s.is_nonterminal()) return;
            int32_t x = s.nt_id();
            if (x <= r)
                throw DecodeError(at, "reference to nonterminal " + std::to_string(x) +
                                          " does not precede its rule");
            ensure(x);
            dcount[static_cast<size_t>(x)] += weight;
            max_ref = std::max(max_ref, x);
        };

        if (sep == n) {
            throw DecodeError(n, "stream truncated inside rule " + std::to_string(r));
        }

        if (syms[sep].is_rule_sep()) {
            // Plain rule.
            if (sep == cursor) throw DecodeError(cursor, "empty rule body");
            SymbolSeq body(syms.begin() + static_cast<std::ptrdiff_t>(cursor),
                           syms.begin() + static_cast<std::ptrdiff_t>(sep));
            for (size_t i = 0; i < body.size(); ++i) note_ref(body[i], cursor + i, deriv);
            g.rules.push_back(Rule::make_plain(std::move(body)));
            dvalue.push_back(deriv);
            cursor = sep + 1;
            continue;
        }

        // Inner rule: paired with the immediately preceding rule.
        if (r == 0) throw DecodeError(sep, "stream begins with an inner rule");
        {
            const Rule& prev = g.rules[static_cast<size_t>(r - 1)];
            int refs = 0;
            if (!prev.is_inner())
                for (Symbol s : prev.plain())
                    if (s.is_nonterminal() && s.nt_id() == r) ++refs;
            if (refs != 1)
                throw DecodeError(sep, "inner rule " + std::to_string(r) +
                                           " is not referenced exactly once by the preceding rule");
        }
        const int64_t m = deriv;

        std::vector<SymbolSeq> exps;
        std::optional<int32_t> fixed_len;
        if (stream.encoding == Encoding::Fixed) {
            const int64_t k = static_cast<int64_t>(sep - cursor);
            if (k < 1) throw DecodeError(cursor, "empty first expansion");
            fixed_len = static_cast<int32_t>(k);
            const size_t tail = static_cast<size_t>((m - 1) * k);
            if (sep + 1 + tail > n)
                throw DecodeError(n, "stream truncated inside fixed-length expansions of rule " +
                                         std::to_string(r));
            exps.emplace_back(syms.begin() + static_cast<std::ptrdiff_t>(cursor),
                              syms.begin() + static_cast<std::ptrdiff_t>(sep));
            size_t at = sep + 1;
            for (int64_t j = 1; j < m; ++j) {
                for (size_t i = 0; i < static_cast<size_t>(k); ++i)
                    if (syms[at + i].is_separator())
                        throw DecodeError(at + i, "separator inside fixed-length expansions");
                exps.emplace_back(syms.begin() + static_cast<std::ptrdiff_t>(at),
                                  syms.begin() + static_cast<std::ptrdiff_t>(at + k));
                at += static_cast<size_t>(k);
            }
            cursor = at;
        } else {
            // Variable: choice-separated list closed by a rule separator.
            size_t at = cursor;
            SymbolSeq current;
            bool closed = false;
            while (at < n) {
                Symbol s = syms[at];
                if (s.is_rule_sep()) {
                    if (current.empty()) throw DecodeError(at, "empty expansion");
                    exps.push_back(std::move(current));
                    ++at;
                    closed = true;
                    break;
                }
                if (s.is_choice_sep()) {
                    if (current.empty()) throw DecodeError(at, "empty expansion");
                    exps.push_back(std::move(current));
                    current = {};
                } else {
                    current.push_back(s);
                }
                ++at;
            }
            if (!closed)
                throw DecodeError(n, "stream truncated inside expansions of rule " +
                                         std::to_string(r));
            if (static_cast<int64_t>(exps.size()) != m)
                throw DecodeError(at - 1, "expansion count mismatch for rule " +
                                              std::to_string(r) + ": listed " +
                                              std::to_string(exps.size()) + ", derived " +
                                              std::to_string(m));
            cursor = at;
        }

        for (const auto& e : exps)
            for (size_t i = 0; i < e.size(); ++i) note_ref(e[i], sep, 1);
        g.rules.push_back(Rule::make_inner(std::move(exps), fixed_len));
        dvalue.push_back(deriv);
    }

    if (max_ref >= g.n_rules())
        throw DecodeError(n, "unknown nonterminal id " + std::to_string(max_ref));

    auto violations = validate(g);
    if (!violations.empty())
        throw DecodeError(n, "decoded grammar is invalid: " + violation_to_string(violations[0]));

    DecodeResult res{std::move(g), {}};
    res.target = expand(res.grammar);
    return res;
}

namespace {

void put_varint(std::string& out, uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<char>((v & 0x7F) | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<char>(v));
}

uint64_t get_varint(const std::string& in, size_t& at) {
    uint64_t v = 0;
    int shift = 0;
    while (true) {
        if (at >= in.size()) throw DecodeError(at, "truncated varint");
        uint8_t b = static_cast<uint8_t>(in[at++]);
        v |= static_cast<uint64_t>(b & 0x7F) << shift;
        if (!(b & 0x80)) break;
        shift += 7;
        if (shift > 63) throw DecodeError(at, "varint overflow");
    }
    return v;
}

constexpr char kMagic[4] = {'N', 'R', 'G', '1'};

}  // namespace

void write_nrg(const std::string& path, const EncodedStream& s) {
    std::string buf;
    buf.append(kMagic, 4);
    buf.push_back(s.mode == AlphabetMode::Byte ? 0 : 1);
    buf.push_back(s.encoding == Encoding::Variable ? 0 : 1);

    // Symbol codes: terminals first, then the two separators, then
    // nonterminals. Byte mode reserves 0..255 for terminals.
    const uint64_t base =
        s.mode == AlphabetMode::Byte ? 256 : static_cast<uint64_t>(s.tokens.size());
    if (s.mode == AlphabetMode::Token) {
        put_varint(buf, static_cast<uint64_t>(s.tokens.size()));
        for (int32_t i = 0; i < s.tokens.size(); ++i) {
            const std::string& t = s.tokens.name(i);
            put_varint(buf, t.size());
            buf.append(t);
        }
    }
    put_varint(buf, s.symbols.size());
    for (Symbol sym : s.symbols) {
        uint64_t code;
        if (sym.is_terminal())
            code = static_cast<uint64_t>(sym.terminal_value());
        else if (sym.is_rule_sep())
            code = base;
        else if (sym.is_choice_sep())
            code = base + 1;
        else
            code = base + 2 + static_cast<uint64_t>(sym.nt_id());
        put_varint(buf, code);
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

EncodedStream read_nrg(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    if (buf.size() < 6 || buf.compare(0, 4, kMagic, 4) != 0)
        throw DecodeError(0, "bad magic, not a grammar stream file");
    EncodedStream s;
    s.mode = buf[4] == 0 ? AlphabetMode::Byte : AlphabetMode::Token;
    s.encoding = buf[5] == 0 ? Encoding::Variable : Encoding::Fixed;
    size_t at = 6;

    uint64_t base = 256;
    if (s.mode == AlphabetMode::Token) {
        uint64_t t = get_varint(buf, at);
        for (uint64_t i = 0; i < t; ++i) {
            uint64_t len = get_varint(buf, at);
            if (at + len > buf.size()) throw DecodeError(at, "truncated token table");
            s.tokens.intern(std::string_view(buf).substr(at, len));
            at += len;
        }
        base = t;
    }
    uint64_t count = get_varint(buf, at);
    s.symbols.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        uint64_t code = get_varint(buf, at);
        if (code < base)
            s.symbols.push_back(Symbol::terminal(static_cast<int32_t>(code)));
        else if (code == base)
            s.symbols.push_back(Symbol::rule_sep());
        else if (code == base + 1)
            s.symbols.push_back(Symbol::choice_sep());
        else
            s.symbols.push_back(Symbol::nonterminal(static_cast<int32_t>(code - base - 2)));
    }
    return s;
}

}  // namespace nrg
