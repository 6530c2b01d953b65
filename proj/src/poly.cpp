#include "ggm/poly.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "ggm/error.hpp"

namespace ggm {

int total_degree(const Monomial& m)
{
    int d = 0;
    for (int e : m)
        d += e;
    return d;
}

int grevlex_cmp(const Monomial& a, const Monomial& b)
{
    int da = total_degree(a), db = total_degree(b);
    if (da != db)
        return da < db ? -1 : 1;
    for (std::size_t k = a.size(); k-- > 0;) {
        if (a[k] != b[k])
            return a[k] < b[k] ? 1 : -1;
    }
    return 0;
}

bool divides(const Monomial& a, const Monomial& b)
{
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] > b[k])
            return false;
    return true;
}

Monomial mono_mul(const Monomial& a, const Monomial& b)
{
    Monomial r(a.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        r[k] = a[k] + b[k];
    return r;
}

Monomial mono_div(const Monomial& a, const Monomial& b)
{
    Monomial r(a.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        r[k] = a[k] - b[k];
    return r;
}

Monomial mono_lcm(const Monomial& a, const Monomial& b)
{
    Monomial r(a.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        r[k] = std::max(a[k], b[k]);
    return r;
}

int mono_weight(const Monomial& m, const std::vector<int>& weights)
{
    int w = 0;
    for (std::size_t k = 0; k < m.size(); ++k)
        w += m[k] * weights[k];
    return w;
}

std::string mono_to_string(const Monomial& m, const std::vector<std::string>& vars)
{
    std::string out;
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (m[k] == 0)
            continue;
        if (!out.empty())
            out += "*";
        out += vars[k];
        if (m[k] > 1)
            out += fmt::format("^{}", m[k]);
    }
    return out.empty() ? "1" : out;
}

Poly Poly::constant(std::size_t nvars, const Field& k, std::int64_t c)
{
    Poly p(nvars, k);
    p.add_term(Monomial(nvars, 0), Scalar(k, c));
    return p;
}

Poly Poly::monomial(const Monomial& m, const Scalar& c, const Field& k)
{
    Poly p(m.size(), k);
    p.add_term(m, c);
    return p;
}

Poly Poly::variable(std::size_t nvars, std::size_t idx, const Field& k)
{
    Monomial m(nvars, 0);
    m[idx] = 1;
    return monomial(m, Scalar::one(k), k);
}

std::optional<int> Poly::weight(const std::vector<int>& weights) const
{
    if (terms_.empty())
        return std::nullopt;
    int w = mono_weight(terms_.front().mono, weights);
    for (const auto& t : terms_)
        if (mono_weight(t.mono, weights) != w)
            return std::nullopt;
    return w;
}

bool Poly::is_homogeneous(const std::vector<int>& weights) const { return terms_.empty() || weight(weights).has_value(); }

void Poly::add_term(const Monomial& m, const Scalar& c)
{
    if (c.is_zero())
        return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, const Monomial& mm) { return grevlex_cmp(t.mono, mm) > 0; });
    if (it != terms_.end() && it->mono == m) {
        it->coeff += c;
        if (it->coeff.is_zero())
            terms_.erase(it);
    } else {
        terms_.insert(it, Term{m, c});
    }
}

Poly Poly::operator-() const
{
    Poly r = *this;
    for (auto& t : r.terms_)
        t.coeff = -t.coeff;
    return r;
}

namespace {

Poly merge(const Poly& a, const Poly& b, const Scalar& cb)
{
    Poly r(std::max(a.nvars(), b.nvars()), a.is_zero() ? b.field() : a.field());
    std::vector<Poly::Term> out;
    out.reserve(a.terms().size() + b.terms().size());
    auto x = a.terms().begin();
    auto y = b.terms().begin();
    while (x != a.terms().end() || y != b.terms().end()) {
        int c = x == a.terms().end() ? -1 : y == b.terms().end() ? 1 : grevlex_cmp(x->mono, y->mono);
        if (c > 0) {
            out.push_back(*x++);
        } else if (c < 0) {
            out.push_back({y->mono, cb * y->coeff});
            ++y;
        } else {
            Scalar s = x->coeff + cb * y->coeff;
            if (!s.is_zero())
                out.push_back({x->mono, s});
            ++x;
            ++y;
        }
    }
    for (auto& t : out)
        r.add_term(t.mono, t.coeff);  // already ordered; add_term appends at the end
    return r;
}

}  // namespace

Poly operator+(const Poly& a, const Poly& b) { return merge(a, b, Scalar::one(b.field())); }
Poly operator-(const Poly& a, const Poly& b) { return merge(a, b, -Scalar::one(b.field())); }

Poly operator*(const Poly& a, const Poly& b)
{
    Poly r(std::max(a.nvars(), b.nvars()), a.field());
    for (const auto& t : b.terms_)
        r = r + a.times_term(t.mono, t.coeff);
    return r;
}

bool operator==(const Poly& a, const Poly& b)
{
    if (a.terms_.size() != b.terms_.size())
        return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
        if (a.terms_[i].mono != b.terms_[i].mono || !(a.terms_[i].coeff == b.terms_[i].coeff))
            return false;
    return true;
}

Poly Poly::scaled(const Scalar& c) const
{
    if (c.is_zero())
        return Poly(nvars_, field_);
    Poly r = *this;
    for (auto& t : r.terms_)
        t.coeff *= c;
    return r;
}

Poly Poly::times_term(const Monomial& m, const Scalar& c) const
{
    Poly r(nvars_, field_);
    if (c.is_zero())
        return r;
    r.terms_.reserve(terms_.size());
    // multiplying by a monomial preserves grevlex order
    for (const auto& t : terms_)
        r.terms_.push_back({mono_mul(t.mono, m), t.coeff * c});
    return r;
}

Poly Poly::pow(unsigned e) const
{
    Poly r = constant(nvars_, field_, 1);
    Poly base = *this;
    while (e) {
        if (e & 1u)
            r = r * base;
        e >>= 1u;
        if (e)
            base = base * base;
    }
    return r;
}

std::string Poly::to_string(const std::vector<std::string>& vars) const
{
    if (terms_.empty())
        return "0";
    std::string out;
    for (const auto& t : terms_) {
        std::string c = t.coeff.to_string();
        bool neg = !c.empty() && c[0] == '-';
        if (neg)
            c = c.substr(1);
        if (out.empty())
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        bool unit_mono = total_degree(t.mono) == 0;
        if (unit_mono)
            out += c;
        else if (c == "1")
            out += mono_to_string(t.mono, vars);
        else
            out += c + "*" + mono_to_string(t.mono, vars);
    }
    return out;
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& vars, const Field& k)
        : text_(text), vars_(vars), k_(k)
    {
    }

    Poly parse()
    {
        Poly p = expr();
        skip();
        if (pos_ != text_.size())
            fail("unexpected character");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& why) const
    {
        throw ParseError(fmt::format("{} at offset {} in polynomial '{}'", why, pos_, text_));
    }

    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Poly expr()
    {
        Poly acc = term();
        for (;;) {
            if (accept('+'))
                acc = acc + term();
            else if (accept('-'))
                acc = acc - term();
            else
                return acc;
        }
    }

    Poly term()
    {
        Poly acc = factor();
        while (accept('*'))
            acc = acc * factor();
        return acc;
    }

    Poly factor()
    {
        if (accept('-'))
            return -factor();
        if (accept('+'))
            return factor();
        Poly base = primary();
        if (accept('^')) {
            skip();
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (start == pos_)
                fail("expected exponent");
            unsigned long e = std::stoul(std::string(text_.substr(start, pos_ - start)));
            if (e > 10000)
                fail("exponent too large");
            base = base.pow(static_cast<unsigned>(e));
        }
        return base;
    }

    Poly primary()
    {
        skip();
        if (pos_ >= text_.size())
            fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Poly p = expr();
            if (!accept(')'))
                fail("expected ')'");
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            mpz_class z(std::string(text_.substr(start, pos_ - start)));
            Scalar s;
            if (k_.is_rational()) {
                s = Scalar(Rational(mpq_class(z)));
            } else {
                mpz_class r = z % k_.characteristic();
                s = Scalar(k_, r.get_si());
            }
            Poly p(vars_.size(), k_);
            p.add_term(Monomial(vars_.size(), 0), s);
            return p;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string_view name = text_.substr(start, pos_ - start);
            auto it = std::find(vars_.begin(), vars_.end(), name);
            if (it == vars_.end()) {
                pos_ = start;
                fail(fmt::format("unknown variable '{}'", name));
            }
            return Poly::variable(vars_.size(), static_cast<std::size_t>(it - vars_.begin()), k_);
        }
        fail("unexpected character");
    }

    std::string_view text_;
    const std::vector<std::string>& vars_;
    Field k_;
    std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text, const std::vector<std::string>& vars, const Field& k)
{
    return Parser(text, vars, k).parse();
}

}  // namespace ggm
