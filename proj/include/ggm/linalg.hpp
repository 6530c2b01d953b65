#pragma once

// Exact linear algebra over Q and prime fields F_p.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace ggm {

/// Exact rational in lowest terms with positive denominator. Values that fit
/// in 64-bit numerator/denominator stay inline; anything larger spills into a
/// shared immutable GMP rational.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n);  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d);
    explicit Rational(const mpq_class& q);

    bool is_zero() const { return !big_ && num_ == 0; }
    bool is_one() const { return !big_ && num_ == 1 && den_ == 1; }
    int sign() const;

    mpq_class to_mpq() const;
    std::string to_string() const;

    Rational operator-() const;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    friend bool operator==(const Rational& a, const Rational& b);

    Rational inverse() const;

    // numerator and denominator as GMP integers, for the F_p rank cross-check
    mpz_class numerator() const;
    mpz_class denominator() const;

private:
    static Rational normalize(const mpq_class& q);
    static Rational from_wide(__int128 n, __int128 d);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    std::shared_ptr<const mpq_class> big_;
};

/// Coefficient field: Q (characteristic 0) or F_p.
class Field {
public:
    Field() = default;
    static Field rationals() { return Field{}; }
    static Field prime(std::uint32_t p);
    /// Accepts "Q" or "Fp:<p>".
    static Field parse(std::string_view text);

    bool is_rational() const { return p_ == 0; }
    std::uint32_t characteristic() const { return p_; }
    std::string to_string() const;

    friend bool operator==(const Field& a, const Field& b) { return a.p_ == b.p_; }

private:
    explicit Field(std::uint32_t p) : p_(p) {}
    std::uint32_t p_ = 0;
};

class Scalar {
public:
    Scalar() = default;  // rational zero
    Scalar(const Field& k, std::int64_t v);
    explicit Scalar(const Rational& q) : q_(q) {}

    static Scalar zero(const Field& k) { return Scalar(k, 0); }
    static Scalar one(const Field& k) { return Scalar(k, 1); }

    Field field() const { return p_ == 0 ? Field::rationals() : Field::prime(p_); }
    bool is_zero() const { return p_ == 0 ? q_.is_zero() : v_ == 0; }
    bool is_one() const { return p_ == 0 ? q_.is_one() : v_ == 1; }

    const Rational& rational() const { return q_; }
    std::uint32_t residue() const { return v_; }

    Scalar operator-() const;
    friend Scalar operator+(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a, const Scalar& b);
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    friend Scalar operator/(const Scalar& a, const Scalar& b);
    friend bool operator==(const Scalar& a, const Scalar& b);
    Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
    Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
    Scalar& operator*=(const Scalar& b) { return *this = *this * b; }

    Scalar inverse() const;
    std::string to_string() const;

private:
    Scalar(std::uint32_t p, std::uint32_t v) : p_(p), v_(v) {}

    std::uint32_t p_ = 0;
    std::uint32_t v_ = 0;
    Rational q_;
};

/// Sparse vector: entries sorted by strictly increasing index, no stored zeros.
class SparseVec {
public:
    struct Entry {
        std::uint32_t index;
        Scalar value;
    };

    SparseVec() = default;
    static SparseVec unit(std::size_t i, const Field& k);
    static SparseVec from_dense(const std::vector<Scalar>& dense);

    bool empty() const { return entries_.empty(); }
    std::size_t nnz() const { return entries_.size(); }
    const std::vector<Entry>& entries() const { return entries_; }

    Scalar get(std::size_t i) const;
    /// Appends an entry; index must exceed every stored index.
    void push_back(std::size_t i, const Scalar& v);
    void set(std::size_t i, const Scalar& v);

    /// this += c * other
    void axpy(const Scalar& c, const SparseVec& other);
    void scale(const Scalar& c);
    std::optional<std::uint32_t> leading() const;

    std::vector<Scalar> to_dense(std::size_t n, const Field& k) const;
    friend bool operator==(const SparseVec& a, const SparseVec& b);

private:
    std::vector<Entry> entries_;
};

/// rows x cols matrix over a field, stored sparsely by column.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const Field& k);

    static Matrix identity(std::size_t n, const Field& k);
    static Matrix from_rows(const std::vector<std::vector<std::int64_t>>& rows, const Field& k,
                            std::size_t cols = 0);
    static Matrix from_columns(std::size_t rows, std::vector<SparseVec> cols, const Field& k);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_.size(); }
    const Field& field() const { return field_; }

    Scalar at(std::size_t r, std::size_t c) const;
    void set(std::size_t r, std::size_t c, const Scalar& v);
    const SparseVec& column(std::size_t c) const { return cols_[c]; }
    void set_column(std::size_t c, SparseVec v);
    std::vector<SparseVec> row_vectors() const;

    bool is_zero() const;
    Matrix transpose() const;
    Matrix operator*(const Matrix& other) const;
    Matrix operator+(const Matrix& other) const;
    Matrix operator-() const;
    SparseVec apply(const SparseVec& v) const;
    friend bool operator==(const Matrix& a, const Matrix& b);

    std::string to_string() const;

private:
    std::size_t rows_ = 0;
    Field field_;
    std::vector<SparseVec> cols_;
};

/// Incrementally built echelon basis of a subspace of k^n: each stored vector
/// is normalized to leading coefficient 1 and no two share a leading index.
class EchelonBasis {
public:
    EchelonBasis() = default;
    EchelonBasis(std::size_t ambient, const Field& k);

    std::size_t ambient() const { return pivot_row_.size(); }
    std::size_t rank() const { return rows_.size(); }
    const Field& field() const { return field_; }

    /// Eliminates every pivot coordinate of v (full reduction).
    SparseVec reduce(SparseVec v) const;
    /// Like reduce but also returns the coefficients c with v = sum c_r row_r + result.
    SparseVec reduce_tracking(SparseVec v, std::vector<Scalar>& coeffs) const;
    bool contains(const SparseVec& v) const { return reduce(v).empty(); }
    /// Adds v if independent; returns whether the rank grew.
    bool insert(SparseVec v);

    const std::vector<SparseVec>& rows() const { return rows_; }
    std::vector<std::uint32_t> pivots() const;
    /// Reduced row echelon form, sorted by pivot.
    std::vector<SparseVec> rref() const;

private:
    Field field_;
    std::vector<SparseVec> rows_;
    std::vector<std::int32_t> pivot_row_;
};

struct RankKernel {
    std::size_t rank = 0;
    std::vector<SparseVec> kernel;  // column vectors, RREF null-space normal form
};

RankKernel rank_kernel(const Matrix& m);
std::size_t rank(const Matrix& m);
std::optional<std::vector<Scalar>> solve_linear(const Matrix& m, const std::vector<Scalar>& b);

/// Echelon basis of the column space of m.
EchelonBasis column_space(const Matrix& m);

/// A sub-matrix placed with its top-left corner at (row, col).
struct Block {
    std::size_t row = 0;
    std::size_t col = 0;
    Matrix m;
};

/// rows x cols matrix assembled from blocks; overlapping entries are summed.
Matrix block_matrix(std::size_t rows, std::size_t cols, const std::vector<Block>& blocks, const Field& k);

}  // namespace ggm
