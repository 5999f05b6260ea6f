#include "jetvar/dsl.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "jetvar/errors.hpp"
#include "jetvar/text.hpp"

namespace jetvar {

namespace {

/// Character cursor with line/column bookkeeping and '#' comments.
class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    void skip() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }
    std::size_t pos() const { return pos_; }
    int line() const { return line_; }
    int column() const { return column_; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void expect(char c, const std::string& what) {
        skip();
        if (peek() != c) fail("expected " + what);
        advance();
    }

    /// Letters, digits and _ : - (header words such as builtin:hilbert).
    std::string word() {
        skip();
        std::string out;
        while (!at_end()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '-') {
                out += c;
                advance();
            } else {
                break;
            }
        }
        return out;
    }

    std::string key() {
        skip();
        std::string out;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
            out += peek();
            advance();
        }
        return out;
    }

    [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, line_, column_); }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

std::string at(int line, int column) {
    return " at line " + std::to_string(line) + ", column " + std::to_string(column);
}

template <class T>
T parse_number(const std::string& value, const Cursor& c, const std::string& key) {
    T out{};
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || p != value.data() + value.size()) c.fail("invalid value '" + value + "' for " + key);
    return out;
}

struct Header {
    std::optional<LagrangianKind> kind;
    std::optional<int> m, n, k, d;
};

void read_header(Cursor& c, LagrangianSpec& spec, Header& h) {
    if (c.word() != "lagrangian") c.fail("expected 'lagrangian'");
    c.expect('{', "'{'");
    c.skip();
    if (c.peek() == '}') {
        c.advance();
        return;
    }
    for (;;) {
        c.skip();
        int key_line = c.line(), key_col = c.column();
        std::string key = c.key();
        if (key.empty()) c.fail("expected a header key");
        c.expect(':', "':' after '" + key + "'");
        c.skip();
        std::string value = c.word();
        if (value.empty()) c.fail("expected a value for '" + key + "'");
        auto positive = [&](const std::string& v) {
            int x = parse_number<int>(v, c, key);
            if (x < 1) c.fail("'" + key + "' must be positive");
            return x;
        };
        if (key == "kind") {
            if (value == "field") {
                h.kind = LagrangianKind::Field;
            } else if (value == "mechanics") {
                h.kind = LagrangianKind::Mechanics;
            } else if (value == "builtin:hilbert") {
                h.kind = LagrangianKind::Hilbert;
            } else {
                c.fail("unknown kind '" + value + "'");
            }
        } else if (key == "m") {
            h.m = positive(value);
        } else if (key == "n") {
            h.n = positive(value);
        } else if (key == "k") {
            h.k = positive(value);
        } else if (key == "d" || key == "dim") {
            h.d = positive(value);
        } else if (key == "max_generations") {
            spec.options.max_generations = positive(value);
        } else if (key == "points") {
            spec.options.points = positive(value);
        } else if (key == "seed") {
            spec.options.seed = parse_number<std::uint64_t>(value, c, key);
        } else if (key == "policy") {
            if (value == "expand") {
                spec.options.policy = NormalizePolicy::Expand;
            } else if (value == "no-expand") {
                spec.options.policy = NormalizePolicy::NoExpand;
            } else {
                c.fail("unknown policy '" + value + "'");
            }
        } else {
            throw SyntaxError("unknown header key '" + key + "'", key_line, key_col);
        }
        c.skip();
        if (c.peek() == ',') {
            c.advance();
            continue;
        }
        if (c.peek() == '}') {
            c.advance();
            return;
        }
        // A newline also separates entries.
        if (c.at_end()) c.fail("unterminated header");
    }
}

void settle_dimensions(Cursor& c, LagrangianSpec& spec, const Header& h) {
    if (!h.kind) c.fail("header needs 'kind'");
    spec.kind = *h.kind;
    switch (spec.kind) {
        case LagrangianKind::Field:
            if (h.d) c.fail("'d' applies to builtin:hilbert only");
            spec.base_dim = h.m.value_or(1);
            spec.fiber_dim = h.n.value_or(1);
            spec.order = h.k.value_or(2);
            if (spec.order > 2) c.fail("field Lagrangians are at most second order");
            break;
        case LagrangianKind::Mechanics:
            if (h.d) c.fail("'d' applies to builtin:hilbert only");
            if (h.m && *h.m != 1) c.fail("mechanics has one base dimension");
            spec.base_dim = 1;
            spec.fiber_dim = h.n.value_or(1);
            spec.order = h.k.value_or(1);
            break;
        case LagrangianKind::Hilbert:
            if (h.m || h.n || h.k) c.fail("builtin:hilbert takes only 'd'");
            spec.base_dim = h.d.value_or(4);
            if (spec.base_dim < 2 || spec.base_dim > 4) c.fail("builtin:hilbert supports d = 2, 3, 4");
            spec.fiber_dim = spec.base_dim * (spec.base_dim + 1) / 2;
            spec.order = 2;
            break;
    }
}

SymbolResolver resolver_for(const LagrangianSpec& spec, int line0, int col0) {
    return [spec_kind = spec.kind, m = spec.base_dim, n = spec.fiber_dim, k = spec.order, line0, col0](
               std::string_view name, int line, int column) -> SymbolId {
        int col = line == line0 ? column + col0 - 1 : column;
        std::string where = at(line, col);
        if (spec_kind == LagrangianKind::Mechanics && name == "t") return SymbolId::intern(Symbol::base(0));
        SymbolId s = symbol_from_name(name);
        const Symbol& sym = s.get();
        switch (sym.kind) {
            case SymbolKind::Base:
                if (sym.direction < m) return s;
                break;
            case SymbolKind::Fiber:
                if (sym.fiber < n && static_cast<int>(sym.index.dim()) == m) {
                    if (sym.index.length() > k)
                        throw OrderViolation("coordinate '" + std::string(name) + "' exceeds order " +
                                             std::to_string(k) + where);
                    return s;
                }
                break;
            default:
                break;
        }
        throw UnknownCoordinate("unknown coordinate '" + std::string(name) + "'" + where);
    };
}

std::string policy_name(NormalizePolicy p) { return p == NormalizePolicy::Expand ? "expand" : "no-expand"; }

}  // namespace

std::string to_string(LagrangianKind kind) {
    switch (kind) {
        case LagrangianKind::Field:
            return "field";
        case LagrangianKind::Mechanics:
            return "mechanics";
        case LagrangianKind::Hilbert:
            return "builtin:hilbert";
    }
    return "field";
}

bool LagrangianSpec::operator==(const LagrangianSpec& o) const {
    return kind == o.kind && base_dim == o.base_dim && fiber_dim == o.fiber_dim && order == o.order &&
           lagrangian == o.lagrangian && options == o.options;
}

LagrangianSpec parse_spec(std::string_view text) {
    Cursor c(text);
    LagrangianSpec spec;
    Header h;
    read_header(c, spec, h);
    settle_dimensions(c, spec, h);
    c.skip();
    if (spec.kind == LagrangianKind::Hilbert) {
        spec.lagrangian = Expr(0);
        if (!c.at_end()) c.fail("builtin:hilbert takes no expression");
        return spec;
    }
    if (c.key() != "L") c.fail("expected 'L = <expression>'");
    c.expect('=', "'=' after L");
    c.skip();
    if (c.at_end()) c.fail("expected an expression after 'L ='");
    const int line0 = c.line(), col0 = c.column();
    std::string_view rest = text.substr(c.pos());
    spec.source = std::string(rest);
    while (!spec.source.empty() && std::isspace(static_cast<unsigned char>(spec.source.back()))) spec.source.pop_back();
    try {
        spec.lagrangian = parse_expr(rest, resolver_for(spec, line0, col0), line0 - 1);
    } catch (const SyntaxError& e) {
        if (e.line() != line0) throw;
        std::string what = e.what();
        what = what.substr(0, what.rfind(" at line "));
        throw SyntaxError(what, e.line(), e.column() + col0 - 1);
    }
    if (spec.kind == LagrangianKind::Mechanics && spec.lagrangian.max_order() > spec.order)
        throw OrderViolation("L exceeds order " + std::to_string(spec.order));
    return spec;
}

std::string print_spec(const LagrangianSpec& spec) {
    std::ostringstream out;
    out << "lagrangian { kind: " << to_string(spec.kind);
    switch (spec.kind) {
        case LagrangianKind::Field:
            out << ", m: " << spec.base_dim << ", n: " << spec.fiber_dim << ", k: " << spec.order;
            break;
        case LagrangianKind::Mechanics:
            out << ", n: " << spec.fiber_dim << ", k: " << spec.order;
            break;
        case LagrangianKind::Hilbert:
            out << ", d: " << spec.base_dim;
            break;
    }
    const SpecOptions& o = spec.options;
    if (o.max_generations) out << ", max_generations: " << *o.max_generations;
    if (o.points) out << ", points: " << *o.points;
    if (o.seed) out << ", seed: " << *o.seed;
    if (o.policy) out << ", policy: " << policy_name(*o.policy);
    out << " }\n";
    if (spec.kind != LagrangianKind::Hilbert) out << "L = " << to_string(spec.lagrangian) << "\n";
    return out.str();
}

NormalizePolicy effective_policy(const LagrangianSpec& spec) {
    if (spec.options.policy) return *spec.options.policy;
    return spec.kind == LagrangianKind::Hilbert ? NormalizePolicy::NoExpand : NormalizePolicy::Expand;
}

FieldLagrangian field_lagrangian(const LagrangianSpec& spec) {
    if (spec.kind == LagrangianKind::Mechanics) {
        if (spec.order > 2) throw OrderViolation("only order-2 mechanics reads as a field Lagrangian");
        return make_field_lagrangian(1, spec.fiber_dim, spec.lagrangian, effective_policy(spec));
    }
    return make_field_lagrangian(spec.base_dim, spec.fiber_dim, spec.lagrangian, effective_policy(spec));
}

MechLagrangian mech_lagrangian(const LagrangianSpec& spec) {
    if (spec.kind != LagrangianKind::Mechanics) throw std::invalid_argument("not a mechanics Lagrangian");
    return make_mech_lagrangian(spec.fiber_dim, spec.order, spec.lagrangian, effective_policy(spec));
}

}  // namespace jetvar
