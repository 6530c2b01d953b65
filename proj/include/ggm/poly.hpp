#pragma once

// Sparse multivariate polynomials with grevlex-ordered terms, plus a parser
// for the relation syntax (integers, variables, + - * ^, parentheses).

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ggm/linalg.hpp"

namespace ggm {

using Monomial = std::vector<int>;

int total_degree(const Monomial& m);
/// Graded reverse lexicographic comparison: negative, zero or positive.
int grevlex_cmp(const Monomial& a, const Monomial& b);
bool divides(const Monomial& a, const Monomial& b);
Monomial mono_mul(const Monomial& a, const Monomial& b);
Monomial mono_div(const Monomial& a, const Monomial& b);  // requires divides(b, a)
Monomial mono_lcm(const Monomial& a, const Monomial& b);
int mono_weight(const Monomial& m, const std::vector<int>& weights);
std::string mono_to_string(const Monomial& m, const std::vector<std::string>& vars);

struct GrevlexGreater {
    bool operator()(const Monomial& a, const Monomial& b) const { return grevlex_cmp(a, b) > 0; }
};

class Poly {
public:
    struct Term {
        Monomial mono;
        Scalar coeff;
    };

    Poly() = default;
    Poly(std::size_t nvars, const Field& k) : nvars_(nvars), field_(k) {}
    static Poly constant(std::size_t nvars, const Field& k, std::int64_t c);
    static Poly monomial(const Monomial& m, const Scalar& c, const Field& k);
    static Poly variable(std::size_t nvars, std::size_t idx, const Field& k);

    std::size_t nvars() const { return nvars_; }
    const Field& field() const { return field_; }
    bool is_zero() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }
    const Term& leading() const { return terms_.front(); }

    /// Common weight of all terms, or nullopt when inhomogeneous; zero has no weight.
    std::optional<int> weight(const std::vector<int>& weights) const;
    bool is_homogeneous(const std::vector<int>& weights) const;

    Poly operator-() const;
    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend bool operator==(const Poly& a, const Poly& b);
    Poly scaled(const Scalar& c) const;
    Poly times_term(const Monomial& m, const Scalar& c) const;
    Poly pow(unsigned e) const;

    /// Adds c*m in place, keeping the term order.
    void add_term(const Monomial& m, const Scalar& c);

    std::string to_string(const std::vector<std::string>& vars) const;

private:
    std::size_t nvars_ = 0;
    Field field_;
    std::vector<Term> terms_;  // strictly decreasing in grevlex
};

Poly parse_poly(std::string_view text, const std::vector<std::string>& vars, const Field& k);

}  // namespace ggm
