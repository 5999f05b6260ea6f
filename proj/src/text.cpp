#include "jetvar/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_set>

#include "jetvar/errors.hpp"
#include "jetvar/normal_form.hpp"
#include "node.hpp"

namespace jetvar {

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string exponent_text(HalfInt e) {
    if (e.is_integer()) {
        int k = e.twice() / 2;
        return k < 0 ? "(" + std::to_string(k) + ")" : std::to_string(k);
    }
    return "(" + std::to_string(e.twice()) + "/2)";
}

std::string print(const Expr& e, std::unordered_map<const Node*, std::string>& memo);

std::string factor_text(const Factor& f, std::unordered_map<const Node*, std::string>& memo) {
    std::string base = print(f.base, memo);
    bool wrap = f.base.kind() == ExprKind::Add || f.base.kind() == ExprKind::Mul ||
                (f.base.is_constant() && (f.base.constant() < 0 || f.base.constant().get_den() != 1));
    if (wrap) base = "(" + base + ")";
    if (f.exponent == HalfInt(1)) return base;
    return base + "^" + exponent_text(f.exponent);
}

std::string print(const Expr& e, std::unordered_map<const Node*, std::string>& memo) {
    switch (e.kind()) {
        case ExprKind::Constant:
            return e.constant().get_str();
        case ExprKind::Symbol:
            return symbol_name(e.symbol());
        default:
            break;
    }
    if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
    std::string out;
    if (e.kind() == ExprKind::Mul) {
        std::vector<std::string> parts;
        for (const Factor& f : e.factors()) parts.push_back(factor_text(f, memo));
        std::sort(parts.begin(), parts.end());
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) out += "*";
            out += parts[i];
        }
    } else {
        struct Piece {
            std::string body;
            Rational coeff;
        };
        std::vector<Piece> pieces;
        for (const Term& t : e.terms()) pieces.push_back({print(t.expr, memo), t.coeff});
        std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.body < b.body; });
        bool first = true;
        auto emit = [&](const Rational& c, const std::string& body) {
            Rational mag = abs(c);
            if (first) {
                if (c < 0) out += "-";
            } else {
                out += c < 0 ? " - " : " + ";
            }
            first = false;
            if (body.empty()) {
                out += mag.get_str();
            } else {
                if (mag != 1) out += mag.get_str() + "*";
                out += body;
            }
        };
        for (const Piece& p : pieces) emit(p.coeff, p.body);
        if (e.constant() != 0) emit(e.constant(), "");
    }
    memo.emplace(e.node(), out);
    return out;
}

}  // namespace

std::string to_string(const Expr& e) {
    std::unordered_map<const Node*, std::string> memo;
    return print(e, memo);
}

// ---------------------------------------------------------------------------
// Names

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

bool parse_index_list(std::string_view s, std::vector<int>& out) {
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') return false;
    s = s.substr(1, s.size() - 2);
    out.clear();
    while (true) {
        std::size_t comma = s.find(',');
        std::string_view item = s.substr(0, comma);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        int v;
        if (!parse_int(item, v) || v < 0) return false;
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return true;
}

}  // namespace

SymbolId symbol_from_name(std::string_view name) {
    int a, b;
    std::vector<int> idx;
    if (name.size() > 1 && name[0] == 'x' && parse_int(name.substr(1), a) && a >= 1)
        return SymbolId::intern(Symbol::base(a - 1));
    std::size_t us = name.find('_');
    if (us != std::string_view::npos && us > 1) {
        char head = name[0];
        std::string_view label = name.substr(1, us - 1);
        std::string_view rest = name.substr(us + 1);
        if (parse_int(label, a) && a >= 1) {
            if (head == 'q' && parse_int(rest, b) && b >= 0)
                return SymbolId::intern(Symbol::fiber_jet(a - 1, MultiIndex{b}));
            if (head == 'u' && parse_index_list(rest, idx))
                return SymbolId::intern(Symbol::fiber_jet(a - 1, MultiIndex(idx)));
            if (head == 'F') {
                if (parse_int(rest, b) && b >= 0)
                    return SymbolId::intern(Symbol::unknown(a - 1, MultiIndex{b}, 0));
                std::size_t close = rest.find(']');
                if (close != std::string_view::npos && close + 2 < rest.size() && rest[close + 1] == '_' &&
                    parse_index_list(rest.substr(0, close + 1), idx) && parse_int(rest.substr(close + 2), b) && b >= 1)
                    return SymbolId::intern(Symbol::unknown(a - 1, MultiIndex(idx), b - 1));
            }
        }
    }
    return SymbolId::intern(Symbol::auxiliary(std::string(name)));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
public:
    Parser(std::string_view text, const SymbolResolver& resolve, int line_offset)
        : text_(text), resolve_(resolve), line_offset_(line_offset) {}

    Expr parse() {
        skip();
        Expr e = expression();
        skip();
        if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }

    [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
        auto [line, col] = location(at);
        throw SyntaxError(what, line, col);
    }

    std::pair<int, int> location(std::size_t at) const {
        int line = 1, col = 1;
        for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line + line_offset_, col};
    }

    void skip() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    bool accept(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            skip();
            return true;
        }
        return false;
    }

    Expr expression() {
        Expr acc = term();
        std::vector<Term> terms{{acc, Rational(1)}};
        for (;;) {
            if (accept('+')) {
                terms.push_back({term(), Rational(1)});
            } else if (accept('-')) {
                terms.push_back({term(), Rational(-1)});
            } else {
                break;
            }
        }
        if (terms.size() == 1) return acc;
        return sum(Rational(0), std::move(terms));
    }

    Expr term() {
        Expr acc = unary();
        for (;;) {
            if (accept('*')) {
                acc = acc * unary();
            } else if (accept('/')) {
                std::size_t at = pos_;
                Expr d = unary();
                if (d.is_zero_constant()) fail_at("division by zero", at);
                acc = acc / d;
            } else {
                return acc;
            }
        }
    }

    Expr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (!accept('^')) return base;
        std::size_t at = pos_;
        Expr ex = unary();
        if (!ex.is_constant()) fail_at("exponent must be a constant", at);
        try {
            return pow(base, HalfInt::from_rational(ex.constant()));
        } catch (const UnsupportedExponent& err) {
            fail_at(err.what(), at);
        }
    }

    Expr primary() {
        skip();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            skip();
            Expr e = expression();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            Rational v(std::string(text_.substr(start, pos_ - start)));
            skip();
            return Expr(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            std::string name = identifier();
            if (name == "sqrt") {
                if (!accept('(')) fail("expected '(' after sqrt");
                Expr e = expression();
                if (!accept(')')) fail("expected ')'");
                return sqrt(e);
            }
            auto [line, col] = location(start);
            SymbolId id = resolve_ ? resolve_(name, line, col) : symbol_from_name(name);
            skip();
            return Expr(id);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string identifier() {
        std::string out;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                out += c;
                ++pos_;
            } else if (c == '[' && !out.empty() && out.back() == '_') {
                std::size_t close = text_.find(']', pos_);
                if (close == std::string_view::npos) fail("unterminated multi-index");
                for (std::size_t i = pos_; i <= close; ++i)
                    if (text_[i] != ' ') out += text_[i];
                pos_ = close + 1;
            } else {
                break;
            }
        }
        return out;
    }

    std::string_view text_;
    const SymbolResolver& resolve_;
    int line_offset_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const SymbolResolver& resolve, int line_offset) {
    Parser p(text, resolve, line_offset);
    return p.parse();
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

Expr subst(const Expr& e, const std::unordered_map<SymbolId, Expr>& bindings, std::uint64_t bloom,
           std::unordered_map<const Node*, Expr>& memo) {
    if (e.is_constant()) return e;
    if (e.is_symbol()) {
        auto it = bindings.find(e.symbol());
        return it == bindings.end() ? e : it->second;
    }
    if ((e.node()->bloom & bloom) == 0) return e;
    if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
    Expr out;
    if (e.kind() == ExprKind::Add) {
        std::vector<Term> terms;
        terms.reserve(e.terms().size());
        for (const Term& t : e.terms()) terms.push_back({subst(t.expr, bindings, bloom, memo), t.coeff});
        out = sum(e.constant(), std::move(terms));
    } else {
        std::vector<Factor> factors;
        factors.reserve(e.factors().size());
        for (const Factor& f : e.factors()) factors.push_back({subst(f.base, bindings, bloom, memo), f.exponent});
        out = product(Rational(1), std::move(factors));
    }
    memo.emplace(e.node(), out);
    return out;
}

void check_acyclic(const std::unordered_map<SymbolId, Expr>& bindings) {
    std::unordered_map<SymbolId, std::vector<SymbolId>> edges;
    for (const auto& [s, v] : bindings) {
        for (SymbolId t : free_symbols(v))
            if (t != s && bindings.count(t)) edges[s].push_back(t);
    }
    std::unordered_map<SymbolId, int> state;  // 1 = on stack, 2 = done
    std::function<void(SymbolId)> visit = [&](SymbolId s) {
        state[s] = 1;
        for (SymbolId t : edges[s]) {
            if (state[t] == 1) throw CyclicBinding("cyclic binding through " + symbol_name(s) + " and " + symbol_name(t));
            if (state[t] == 0) visit(t);
        }
        state[s] = 2;
    };
    for (const auto& [s, v] : bindings)
        if (state[s] == 0) visit(s);
}

}  // namespace

Expr substitute_raw(const Expr& e, const std::unordered_map<SymbolId, Expr>& bindings) {
    std::uint64_t bloom = 0;
    for (const auto& [s, v] : bindings) bloom |= Expr(s).node()->bloom;
    std::unordered_map<const Node*, Expr> memo;
    return subst(e, bindings, bloom, memo);
}

Expr substitute(const Expr& e, const std::unordered_map<SymbolId, Expr>& bindings) {
    check_acyclic(bindings);
    return normalize(substitute_raw(e, bindings));
}

}  // namespace jetvar
