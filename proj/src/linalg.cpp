#include "ggm/linalg.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "ggm/error.hpp"

namespace ggm {

namespace {

using u128 = unsigned __int128;
using i128 = __int128;

constexpr std::int64_t kMin64 = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kMax64 = std::numeric_limits<std::int64_t>::max();

u128 gcd_u128(u128 a, u128 b)
{
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b)
{
    while (b != 0) {
        std::uint64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::uint64_t abs_u64(std::int64_t v)
{
    return v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1u : static_cast<std::uint64_t>(v);
}

mpz_class mpz_from_i128(i128 v)
{
    bool neg = v < 0;
    u128 m = neg ? static_cast<u128>(-(v + 1)) + 1u : static_cast<u128>(v);
    mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(m >> 64)));
    mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(m)));
    mpz_class r = (hi << 64) + lo;
    return neg ? mpz_class(-r) : r;
}

bool fits_small(i128 v) { return v > static_cast<i128>(kMin64) && v <= static_cast<i128>(kMax64); }

std::uint32_t mod_inverse(std::uint32_t v, std::uint32_t p)
{
    if (v == 0)
        throw std::domain_error("division by zero in F_p");
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = p, new_r = v;
    while (new_r != 0) {
        std::int64_t q = r / new_r;
        std::int64_t tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (t < 0)
        t += p;
    return static_cast<std::uint32_t>(t);
}

bool is_prime(std::uint32_t p)
{
    if (p < 2)
        return false;
    for (std::uint32_t q = 2; static_cast<std::uint64_t>(q) * q <= p; ++q)
        if (p % q == 0)
            return false;
    return true;
}

}  // namespace

// ---------------------------------------------------------------- Rational

Rational::Rational(std::int64_t n)
{
    if (n == kMin64)
        *this = normalize(mpq_class(mpz_from_i128(n)));
    else
        num_ = n;
}

Rational::Rational(std::int64_t n, std::int64_t d)
{
    if (d == 0)
        throw std::domain_error("zero denominator");
    *this = from_wide(n, d);
}

Rational::Rational(const mpq_class& q) { *this = normalize(q); }

Rational Rational::normalize(const mpq_class& q)
{
    Rational r;
    const mpz_class& n = q.get_num();
    const mpz_class& d = q.get_den();
    if (n.fits_slong_p() && d.fits_slong_p() && n.get_si() != kMin64) {
        r.num_ = n.get_si();
        r.den_ = d.get_si();
    } else {
        r.num_ = 0;
        r.den_ = 1;
        r.big_ = std::make_shared<const mpq_class>(q);
    }
    return r;
}

Rational Rational::from_wide(i128 n, i128 d)
{
    if (d < 0) {
        n = -n;
        d = -d;
    }
    if (n == 0) {
        return Rational{};
    }
    u128 an = n < 0 ? static_cast<u128>(-n) : static_cast<u128>(n);
    u128 g = gcd_u128(an, static_cast<u128>(d));
    if (g != 1) {
        n /= static_cast<i128>(g);
        d /= static_cast<i128>(g);
    }
    if (fits_small(n) && fits_small(d)) {
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }
    mpq_class q(mpz_from_i128(n), mpz_from_i128(d));
    q.canonicalize();
    return normalize(q);
}

int Rational::sign() const
{
    if (big_)
        return sgn(*big_);
    return (num_ > 0) - (num_ < 0);
}

mpq_class Rational::to_mpq() const
{
    if (big_)
        return *big_;
    return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
}

mpz_class Rational::numerator() const { return big_ ? mpz_class(big_->get_num()) : mpz_class(static_cast<long>(num_)); }
mpz_class Rational::denominator() const { return big_ ? mpz_class(big_->get_den()) : mpz_class(static_cast<long>(den_)); }

std::string Rational::to_string() const
{
    if (big_)
        return big_->get_str();
    if (den_ == 1)
        return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator-() const
{
    if (big_)
        return normalize(-*big_);
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

Rational operator+(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_) {
        if (a.den_ == 1 && b.den_ == 1) {
            std::int64_t s;
            if (!__builtin_add_overflow(a.num_, b.num_, &s) && s != kMin64) {
                Rational r;
                r.num_ = s;
                return r;
            }
        }
        i128 x = static_cast<i128>(a.num_) * b.den_;
        i128 y = static_cast<i128>(b.num_) * a.den_;
        i128 s;
        if (!__builtin_add_overflow(x, y, &s))
            return Rational::from_wide(s, static_cast<i128>(a.den_) * b.den_);
    }
    return Rational::normalize(a.to_mpq() + b.to_mpq());
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_) {
        if (a.num_ == 0 || b.num_ == 0)
            return Rational{};
        std::int64_t g1 = static_cast<std::int64_t>(gcd_u64(abs_u64(a.num_), static_cast<std::uint64_t>(b.den_)));
        std::int64_t g2 = static_cast<std::int64_t>(gcd_u64(abs_u64(b.num_), static_cast<std::uint64_t>(a.den_)));
        i128 n = static_cast<i128>(a.num_ / g1) * (b.num_ / g2);
        i128 d = static_cast<i128>(a.den_ / g2) * (b.den_ / g1);
        if (fits_small(n) && fits_small(d)) {
            Rational r;
            r.num_ = static_cast<std::int64_t>(n);
            r.den_ = static_cast<std::int64_t>(d);
            return r;
        }
        return Rational::from_wide(n, d);
    }
    return Rational::normalize(a.to_mpq() * b.to_mpq());
}

Rational Rational::inverse() const
{
    if (is_zero())
        throw std::domain_error("division by zero in Q");
    if (big_)
        return normalize(1 / *big_);
    Rational r;
    if (num_ < 0) {
        r.num_ = -den_;
        r.den_ = -num_;
    } else {
        r.num_ = den_;
        r.den_ = num_;
    }
    return r;
}

Rational operator/(const Rational& a, const Rational& b) { return a * b.inverse(); }

bool operator==(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_)
        return a.num_ == b.num_ && a.den_ == b.den_;
    if (a.big_ && b.big_)
        return *a.big_ == *b.big_;
    return false;  // normalized forms differ in representation only if values differ
}

// ---------------------------------------------------------------- Field

Field Field::prime(std::uint32_t p)
{
    if (p >= (1u << 31) || !is_prime(p))
        throw ArgumentError(fmt::format("{} is not a supported prime (need p < 2^31)", p));
    return Field(p);
}

Field Field::parse(std::string_view text)
{
    if (text == "Q" || text == "QQ")
        return rationals();
    if (text.substr(0, 3) == "Fp:" || text.substr(0, 3) == "GF:") {
        std::string num(text.substr(3));
        try {
            std::size_t used = 0;
            unsigned long p = std::stoul(num, &used);
            if (used != num.size())
                throw ArgumentError("bad prime");
            return prime(static_cast<std::uint32_t>(p));
        } catch (const std::logic_error&) {
            throw ArgumentError(fmt::format("bad field descriptor '{}'", text));
        }
    }
    throw ArgumentError(fmt::format("bad field descriptor '{}' (expected Q or Fp:<p>)", text));
}

std::string Field::to_string() const { return p_ == 0 ? "Q" : fmt::format("Fp:{}", p_); }

// ---------------------------------------------------------------- Scalar

Scalar::Scalar(const Field& k, std::int64_t v)
{
    if (k.is_rational()) {
        q_ = Rational(v);
    } else {
        p_ = k.characteristic();
        std::int64_t r = v % static_cast<std::int64_t>(p_);
        if (r < 0)
            r += p_;
        v_ = static_cast<std::uint32_t>(r);
    }
}

namespace {

// A default-constructed (rational) zero may meet an F_p value; promote it.
inline std::uint32_t common_prime(const Scalar& a, const Scalar& b, std::uint32_t pa, std::uint32_t pb)
{
    if (pa == pb)
        return pa;
    if (pa == 0 && a.is_zero())
        return pb;
    if (pb == 0 && b.is_zero())
        return pa;
    throw std::logic_error("mixing scalars from different fields");
}

}  // namespace

Scalar Scalar::operator-() const
{
    if (p_ == 0)
        return Scalar(-q_);
    return Scalar(p_, v_ == 0 ? 0 : p_ - v_);
}

Scalar operator+(const Scalar& a, const Scalar& b)
{
    std::uint32_t p = common_prime(a, b, a.p_, b.p_);
    if (p == 0)
        return Scalar(a.q_ + b.q_);
    std::uint64_t s = static_cast<std::uint64_t>(a.p_ ? a.v_ : 0) + (b.p_ ? b.v_ : 0);
    return Scalar(p, static_cast<std::uint32_t>(s % p));
}

Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

Scalar operator*(const Scalar& a, const Scalar& b)
{
    std::uint32_t p = common_prime(a, b, a.p_, b.p_);
    if (p == 0)
        return Scalar(a.q_ * b.q_);
    std::uint64_t s = static_cast<std::uint64_t>(a.p_ ? a.v_ : 0) * (b.p_ ? b.v_ : 0);
    return Scalar(p, static_cast<std::uint32_t>(s % p));
}

Scalar Scalar::inverse() const
{
    if (p_ == 0)
        return Scalar(q_.inverse());
    return Scalar(p_, mod_inverse(v_, p_));
}

Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }

bool operator==(const Scalar& a, const Scalar& b)
{
    if (a.p_ != b.p_)
        return a.is_zero() && b.is_zero();
    return a.p_ == 0 ? a.q_ == b.q_ : a.v_ == b.v_;
}

std::string Scalar::to_string() const { return p_ == 0 ? q_.to_string() : std::to_string(v_); }

// ---------------------------------------------------------------- SparseVec

SparseVec SparseVec::unit(std::size_t i, const Field& k)
{
    SparseVec v;
    v.entries_.push_back({static_cast<std::uint32_t>(i), Scalar::one(k)});
    return v;
}

SparseVec SparseVec::from_dense(const std::vector<Scalar>& dense)
{
    SparseVec v;
    for (std::size_t i = 0; i < dense.size(); ++i)
        if (!dense[i].is_zero())
            v.entries_.push_back({static_cast<std::uint32_t>(i), dense[i]});
    return v;
}

Scalar SparseVec::get(std::size_t i) const
{
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const Entry& e, std::size_t idx) { return e.index < idx; });
    if (it != entries_.end() && it->index == i)
        return it->value;
    return Scalar{};
}

void SparseVec::push_back(std::size_t i, const Scalar& v)
{
    if (!entries_.empty() && entries_.back().index >= i)
        throw std::logic_error("SparseVec::push_back out of order");
    if (!v.is_zero())
        entries_.push_back({static_cast<std::uint32_t>(i), v});
}

void SparseVec::set(std::size_t i, const Scalar& v)
{
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const Entry& e, std::size_t idx) { return e.index < idx; });
    if (it != entries_.end() && it->index == i) {
        if (v.is_zero())
            entries_.erase(it);
        else
            it->value = v;
    } else if (!v.is_zero()) {
        entries_.insert(it, {static_cast<std::uint32_t>(i), v});
    }
}

void SparseVec::axpy(const Scalar& c, const SparseVec& other)
{
    if (c.is_zero() || other.entries_.empty())
        return;
    std::vector<Entry> out;
    out.reserve(entries_.size() + other.entries_.size());
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() || b != other.entries_.end()) {
        if (b == other.entries_.end() || (a != entries_.end() && a->index < b->index)) {
            out.push_back(std::move(*a));
            ++a;
        } else if (a == entries_.end() || b->index < a->index) {
            out.push_back({b->index, c * b->value});
            ++b;
        } else {
            Scalar s = a->value + c * b->value;
            if (!s.is_zero())
                out.push_back({a->index, std::move(s)});
            ++a;
            ++b;
        }
    }
    entries_ = std::move(out);
}

void SparseVec::scale(const Scalar& c)
{
    if (c.is_zero()) {
        entries_.clear();
        return;
    }
    for (auto& e : entries_)
        e.value = e.value * c;
}

std::optional<std::uint32_t> SparseVec::leading() const
{
    if (entries_.empty())
        return std::nullopt;
    return entries_.front().index;
}

std::vector<Scalar> SparseVec::to_dense(std::size_t n, const Field& k) const
{
    std::vector<Scalar> d(n, Scalar::zero(k));
    for (const auto& e : entries_) {
        if (e.index >= n)
            throw DimensionError("sparse vector longer than requested dense length");
        d[e.index] = e.value;
    }
    return d;
}

bool operator==(const SparseVec& a, const SparseVec& b)
{
    if (a.entries_.size() != b.entries_.size())
        return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i)
        if (a.entries_[i].index != b.entries_[i].index || !(a.entries_[i].value == b.entries_[i].value))
            return false;
    return true;
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, const Field& k) : rows_(rows), field_(k), cols_(cols) {}

Matrix Matrix::identity(std::size_t n, const Field& k)
{
    Matrix m(n, n, k);
    for (std::size_t i = 0; i < n; ++i)
        m.cols_[i] = SparseVec::unit(i, k);
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows, const Field& k, std::size_t cols)
{
    if (!rows.empty())
        cols = rows.front().size();
    Matrix m(rows.size(), cols, k);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols)
            throw DimensionError("ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c)
            if (rows[r][c] != 0)
                m.cols_[c].push_back(r, Scalar(k, rows[r][c]));
    }
    return m;
}

Matrix Matrix::from_columns(std::size_t rows, std::vector<SparseVec> cols, const Field& k)
{
    Matrix m(rows, 0, k);
    for (const auto& c : cols)
        if (!c.empty() && c.entries().back().index >= rows)
            throw DimensionError("column entry beyond row count");
    m.cols_ = std::move(cols);
    return m;
}

Scalar Matrix::at(std::size_t r, std::size_t c) const
{
    if (r >= rows_ || c >= cols_.size())
        throw DimensionError("matrix index out of range");
    Scalar v = cols_[c].get(r);
    return v.is_zero() ? Scalar::zero(field_) : v;
}

void Matrix::set(std::size_t r, std::size_t c, const Scalar& v)
{
    if (r >= rows_ || c >= cols_.size())
        throw DimensionError("matrix index out of range");
    cols_[c].set(r, v);
}

void Matrix::set_column(std::size_t c, SparseVec v)
{
    if (c >= cols_.size())
        throw DimensionError("column index out of range");
    if (!v.empty() && v.entries().back().index >= rows_)
        throw DimensionError("column entry beyond row count");
    cols_[c] = std::move(v);
}

std::vector<SparseVec> Matrix::row_vectors() const
{
    std::vector<SparseVec> rows(rows_);
    for (std::size_t c = 0; c < cols_.size(); ++c)
        for (const auto& e : cols_[c].entries())
            rows[e.index].push_back(c, e.value);
    return rows;
}

bool Matrix::is_zero() const
{
    return std::all_of(cols_.begin(), cols_.end(), [](const SparseVec& c) { return c.empty(); });
}

Matrix Matrix::transpose() const
{
    Matrix t(cols_.size(), rows_, field_);
    t.cols_ = row_vectors();
    return t;
}

SparseVec Matrix::apply(const SparseVec& v) const
{
    SparseVec out;
    for (const auto& e : v.entries()) {
        if (e.index >= cols_.size())
            throw DimensionError("vector longer than matrix width");
        out.axpy(e.value, cols_[e.index]);
    }
    return out;
}

Matrix Matrix::operator*(const Matrix& other) const
{
    if (cols_.size() != other.rows_)
        throw DimensionError(fmt::format("cannot multiply {}x{} by {}x{}", rows_, cols_.size(), other.rows_,
                                         other.cols_.size()));
    Matrix out(rows_, other.cols_.size(), field_);
    for (std::size_t c = 0; c < other.cols_.size(); ++c)
        out.cols_[c] = apply(other.cols_[c]);
    return out;
}

Matrix Matrix::operator+(const Matrix& other) const
{
    if (rows_ != other.rows_ || cols_.size() != other.cols_.size())
        throw DimensionError("matrix sum shape mismatch");
    Matrix out = *this;
    for (std::size_t c = 0; c < cols_.size(); ++c)
        out.cols_[c].axpy(Scalar::one(field_), other.cols_[c]);
    return out;
}

Matrix Matrix::operator-() const
{
    Matrix out = *this;
    for (auto& c : out.cols_)
        c.scale(-Scalar::one(field_));
    return out;
}

bool operator==(const Matrix& a, const Matrix& b)
{
    return a.rows_ == b.rows_ && a.cols_.size() == b.cols_.size() && a.cols_ == b.cols_;
}

std::string Matrix::to_string() const
{
    std::ostringstream os;
    for (std::size_t r = 0; r < rows_; ++r) {
        os << "[";
        for (std::size_t c = 0; c < cols_.size(); ++c)
            os << (c ? " " : "") << at(r, c).to_string();
        os << "]\n";
    }
    return os.str();
}

// ---------------------------------------------------------------- EchelonBasis

EchelonBasis::EchelonBasis(std::size_t ambient, const Field& k) : field_(k), pivot_row_(ambient, -1) {}

SparseVec EchelonBasis::reduce(SparseVec v) const
{
    std::uint32_t cursor = 0;
    for (;;) {
        const auto& es = v.entries();
        auto it = std::lower_bound(es.begin(), es.end(), cursor,
                                   [](const SparseVec::Entry& e, std::uint32_t idx) { return e.index < idx; });
        while (it != es.end() && (it->index >= pivot_row_.size() || pivot_row_[it->index] < 0))
            ++it;
        if (it == es.end())
            break;
        std::uint32_t idx = it->index;
        Scalar c = -it->value;
        v.axpy(c, rows_[pivot_row_[idx]]);
        cursor = idx + 1;
    }
    return v;
}

SparseVec EchelonBasis::reduce_tracking(SparseVec v, std::vector<Scalar>& coeffs) const
{
    coeffs.assign(rows_.size(), Scalar::zero(field_));
    std::uint32_t cursor = 0;
    for (;;) {
        const auto& es = v.entries();
        auto it = std::lower_bound(es.begin(), es.end(), cursor,
                                   [](const SparseVec::Entry& e, std::uint32_t idx) { return e.index < idx; });
        while (it != es.end() && (it->index >= pivot_row_.size() || pivot_row_[it->index] < 0))
            ++it;
        if (it == es.end())
            break;
        std::uint32_t idx = it->index;
        Scalar c = it->value;
        coeffs[pivot_row_[idx]] += c;
        v.axpy(-c, rows_[pivot_row_[idx]]);
        cursor = idx + 1;
    }
    return v;
}

bool EchelonBasis::insert(SparseVec v)
{
    if (!v.empty() && v.entries().back().index >= pivot_row_.size())
        throw DimensionError("vector outside the ambient space of the echelon basis");
    v = reduce(std::move(v));
    if (v.empty())
        return false;
    std::uint32_t lead = *v.leading();
    v.scale(v.entries().front().value.inverse());
    pivot_row_[lead] = static_cast<std::int32_t>(rows_.size());
    rows_.push_back(std::move(v));
    return true;
}

std::vector<std::uint32_t> EchelonBasis::pivots() const
{
    std::vector<std::uint32_t> p;
    p.reserve(rows_.size());
    for (const auto& r : rows_)
        p.push_back(*r.leading());
    return p;
}

std::vector<SparseVec> EchelonBasis::rref() const
{
    std::vector<SparseVec> rows = rows_;
    std::sort(rows.begin(), rows.end(), [](const SparseVec& a, const SparseVec& b) { return *a.leading() < *b.leading(); });
    std::vector<std::int32_t> where(pivot_row_.size(), -1);
    for (std::size_t i = 0; i < rows.size(); ++i)
        where[*rows[i].leading()] = static_cast<std::int32_t>(i);
    for (std::size_t ii = rows.size(); ii-- > 0;) {
        SparseVec& r = rows[ii];
        std::uint32_t cursor = *r.leading() + 1;
        for (;;) {
            const auto& es = r.entries();
            auto it = std::lower_bound(es.begin(), es.end(), cursor,
                                       [](const SparseVec::Entry& e, std::uint32_t idx) { return e.index < idx; });
            while (it != es.end() && where[it->index] < 0)
                ++it;
            if (it == es.end())
                break;
            std::uint32_t idx = it->index;
            Scalar c = -it->value;
            r.axpy(c, rows[where[idx]]);
            cursor = idx + 1;
        }
    }
    return rows;
}

// ---------------------------------------------------------------- free functions

RankKernel rank_kernel(const Matrix& m)
{
    EchelonBasis eb(m.cols(), m.field());
    for (auto& row : m.row_vectors())
        eb.insert(std::move(row));
    RankKernel out;
    out.rank = eb.rank();
    auto rows = eb.rref();
    std::vector<bool> is_pivot(m.cols(), false);
    for (const auto& r : rows)
        is_pivot[*r.leading()] = true;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f])
            continue;
        std::vector<std::pair<std::uint32_t, Scalar>> parts;
        parts.emplace_back(static_cast<std::uint32_t>(f), Scalar::one(m.field()));
        for (const auto& r : rows) {
            Scalar c = r.get(f);
            if (!c.is_zero())
                parts.emplace_back(*r.leading(), -c);
        }
        std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        SparseVec k;
        for (auto& [i, v] : parts)
            k.push_back(i, v);
        out.kernel.push_back(std::move(k));
    }
    return out;
}

std::size_t rank(const Matrix& m)
{
    // insert along the shorter side
    if (m.cols() <= m.rows())
        return column_space(m).rank();
    EchelonBasis eb(m.cols(), m.field());
    for (auto& row : m.row_vectors())
        eb.insert(std::move(row));
    return eb.rank();
}

EchelonBasis column_space(const Matrix& m)
{
    EchelonBasis eb(m.rows(), m.field());
    for (std::size_t c = 0; c < m.cols(); ++c)
        eb.insert(m.column(c));
    return eb;
}

std::optional<std::vector<Scalar>> solve_linear(const Matrix& m, const std::vector<Scalar>& b)
{
    if (b.size() != m.rows())
        throw DimensionError(fmt::format("right-hand side has length {}, matrix has {} rows", b.size(), m.rows()));
    const std::size_t n = m.cols();
    EchelonBasis eb(n + 1, m.field());
    auto rows = m.row_vectors();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        SparseVec row = std::move(rows[r]);
        row.push_back(n, b[r]);
        eb.insert(std::move(row));
    }
    std::vector<Scalar> x(n, Scalar::zero(m.field()));
    for (const auto& r : eb.rref()) {
        std::uint32_t p = *r.leading();
        if (p == n)
            return std::nullopt;
        Scalar rhs = r.get(n);
        if (!rhs.is_zero())
            x[p] = rhs;
    }
    return x;
}

Matrix block_matrix(std::size_t rows, std::size_t cols, const std::vector<Block>& blocks, const Field& k)
{
    std::vector<std::map<std::uint32_t, Scalar>> acc(cols);
    for (const auto& b : blocks) {
        if (b.row + b.m.rows() > rows || b.col + b.m.cols() > cols)
            throw DimensionError("block does not fit in the assembled matrix");
        for (std::size_t c = 0; c < b.m.cols(); ++c)
            for (const auto& e : b.m.column(c).entries()) {
                auto [it, fresh] = acc[b.col + c].try_emplace(static_cast<std::uint32_t>(b.row + e.index), e.value);
                if (!fresh)
                    it->second += e.value;
            }
    }
    std::vector<SparseVec> out(cols);
    for (std::size_t c = 0; c < cols; ++c)
        for (const auto& [r, v] : acc[c])
            if (!v.is_zero())
                out[c].push_back(r, v);
    return Matrix::from_columns(rows, std::move(out), k);
}

}  // namespace ggm
