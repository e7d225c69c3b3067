// tensor.cpp — ComplexTensor implementation

#include "floquet_if/tensor.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "floquet_if/errors.hpp"

namespace floquet::num {

namespace {

std::size_t product(const ComplexTensor::Shape& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>{});
}

std::string shape_string(const ComplexTensor::Shape& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ']';
    return os.str();
}

void check_extents(const ComplexTensor::Shape& s) {
    for (auto e : s)
        if (e == 0) throw DimensionError("tensor extents must be positive, got " + shape_string(s));
}

std::vector<std::size_t> row_major_strides(const ComplexTensor::Shape& s) {
    std::vector<std::size_t> st(s.size(), 1);
    for (std::size_t i = s.size(); i-- > 1;) st[i - 1] = st[i] * s[i];
    return st;
}

template <typename T>
void put_le(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    std::array<char, sizeof(T)> bytes;
    if (!in.read(bytes.data(), sizeof(T))) throw InputError("tensor stream truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

}  // namespace

ComplexTensor::ComplexTensor() : shape_{1}, data_(std::make_shared<const std::vector<cd>>(1)) {}

ComplexTensor::ComplexTensor(Shape shape, std::vector<cd> data) : shape_(std::move(shape)) {
    check_extents(shape_);
    if (product(shape_) != data.size())
        throw DimensionError("tensor shape " + shape_string(shape_) + " holds " +
                             std::to_string(product(shape_)) + " entries, got " +
                             std::to_string(data.size()));
    data_ = std::make_shared<const std::vector<cd>>(std::move(data));
}

ComplexTensor::ComplexTensor(Shape shape) : shape_(std::move(shape)) {
    check_extents(shape_);
    data_ = std::make_shared<const std::vector<cd>>(product(shape_));
}

ComplexTensor ComplexTensor::from_matrix(const Matrix& m) {
    return from_matrix(m, {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
}

ComplexTensor ComplexTensor::from_matrix(const Matrix& m, Shape shape) {
    std::vector<cd> data(static_cast<std::size_t>(m.size()));
    Eigen::Map<Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        data.data(), m.rows(), m.cols()) = m;
    return ComplexTensor(std::move(shape), std::move(data));
}

ComplexTensor ComplexTensor::from_vector(const Vector& v) {
    return ComplexTensor({static_cast<std::size_t>(v.size())}, std::vector<cd>(v.data(), v.data() + v.size()));
}

cd ComplexTensor::at(std::span<const std::size_t> index) const {
    if (index.size() != shape_.size())
        throw DimensionError("index rank " + std::to_string(index.size()) + " does not match tensor rank " +
                             std::to_string(shape_.size()));
    std::size_t flat = 0;
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] >= shape_[i]) throw DimensionError("index out of range on axis " + std::to_string(i));
        flat = flat * shape_[i] + index[i];
    }
    return (*data_)[flat];
}

ComplexTensor ComplexTensor::reshape(Shape new_shape) const {
    check_extents(new_shape);
    if (product(new_shape) != size())
        throw DimensionError("cannot reshape " + shape_string(shape_) + " to " + shape_string(new_shape));
    ComplexTensor out = *this;
    out.shape_ = std::move(new_shape);
    return out;
}

ComplexTensor ComplexTensor::permute(std::span<const std::size_t> axes) const {
    const std::size_t r = rank();
    if (axes.size() != r) throw DimensionError("permutation rank mismatch");
    std::vector<bool> seen(r, false);
    for (auto a : axes) {
        if (a >= r || seen[a]) throw DimensionError("invalid axis permutation");
        seen[a] = true;
    }
    Shape out_shape(r);
    for (std::size_t i = 0; i < r; ++i) out_shape[i] = shape_[axes[i]];
    const auto in_strides = row_major_strides(shape_);
    std::vector<std::size_t> stride_for_out(r);
    for (std::size_t i = 0; i < r; ++i) stride_for_out[i] = in_strides[axes[i]];

    std::vector<cd> out(size());
    std::vector<std::size_t> idx(r, 0);
    const auto& in = *data_;
    std::size_t src = 0;
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        out[flat] = in[src];
        // odometer increment over the output index
        for (std::size_t ax = r; ax-- > 0;) {
            ++idx[ax];
            src += stride_for_out[ax];
            if (idx[ax] < out_shape[ax]) break;
            src -= stride_for_out[ax] * idx[ax];
            idx[ax] = 0;
        }
    }
    return ComplexTensor(std::move(out_shape), std::move(out));
}

Matrix ComplexTensor::as_matrix(std::size_t row_axes) const {
    if (row_axes > rank()) throw DimensionError("row axis count exceeds tensor rank");
    std::size_t rows = 1;
    for (std::size_t i = 0; i < row_axes; ++i) rows *= shape_[i];
    const std::size_t cols = size() / rows;
    return Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        data_->data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

Matrix ComplexTensor::as_matrix() const {
    if (rank() != 2) throw DimensionError("as_matrix() needs a rank-2 tensor, got rank " + std::to_string(rank()));
    return as_matrix(1);
}

double ComplexTensor::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : *data_) s += std::norm(z);
    return std::sqrt(s);
}

bool operator==(const ComplexTensor& a, const ComplexTensor& b) {
    return a.shape_ == b.shape_ && *a.data_ == *b.data_;
}

ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b, std::span<const AxisPair> pairs) {
    std::vector<bool> a_paired(a.rank(), false), b_paired(b.rank(), false);
    for (const auto& [ia, ib] : pairs) {
        if (ia >= a.rank() || ib >= b.rank())
            throw DimensionError("contraction pair (" + std::to_string(ia) + "," + std::to_string(ib) +
                                 ") refers to a missing axis");
        if (a_paired[ia] || b_paired[ib])
            throw DimensionError("axis used twice in contraction pair (" + std::to_string(ia) + "," +
                                 std::to_string(ib) + ")");
        if (a.shape()[ia] != b.shape()[ib])
            throw DimensionError("extent mismatch in contraction pair (" + std::to_string(ia) + "," +
                                 std::to_string(ib) + "): " + std::to_string(a.shape()[ia]) + " vs " +
                                 std::to_string(b.shape()[ib]));
        a_paired[ia] = b_paired[ib] = true;
    }

    // a -> (free..., paired...), b -> (paired..., free...)
    std::vector<std::size_t> a_axes, b_axes;
    ComplexTensor::Shape out_shape;
    for (std::size_t i = 0; i < a.rank(); ++i)
        if (!a_paired[i]) {
            a_axes.push_back(i);
            out_shape.push_back(a.shape()[i]);
        }
    const std::size_t a_free = a_axes.size();
    for (const auto& p : pairs) {
        a_axes.push_back(p.first);
        b_axes.push_back(p.second);
    }
    for (std::size_t i = 0; i < b.rank(); ++i)
        if (!b_paired[i]) {
            b_axes.push_back(i);
            out_shape.push_back(b.shape()[i]);
        }

    const Matrix am = a.permute(a_axes).as_matrix(a_free);
    const Matrix bm = b.permute(b_axes).as_matrix(pairs.size());
    const Matrix prod = am * bm;
    if (out_shape.empty()) out_shape.push_back(1);
    return ComplexTensor::from_matrix(prod, std::move(out_shape));
}

void write_tensor(std::ostream& out, const ComplexTensor& t) {
    out.write("FIFT", 4);
    put_le<std::uint32_t>(out, kTensorFormatVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (auto e : t.shape()) put_le<std::uint64_t>(out, static_cast<std::uint64_t>(e));
    for (const auto& z : t.data()) {
        put_le<double>(out, z.real());
        put_le<double>(out, z.imag());
    }
    if (!out) throw Error("failed writing tensor stream");
}

ComplexTensor read_tensor(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "FIFT", 4) != 0) throw InputError("not a FIFT tensor stream");
    const auto version = get_le<std::uint32_t>(in);
    if (version != kTensorFormatVersion)
        throw InputError("unsupported FIFT version " + std::to_string(version));
    const auto rank = get_le<std::uint32_t>(in);
    if (rank == 0 || rank > 64) throw InputError("implausible FIFT rank " + std::to_string(rank));
    ComplexTensor::Shape shape(rank);
    for (auto& e : shape) e = static_cast<std::size_t>(get_le<std::uint64_t>(in));
    std::size_t n = 1;
    for (auto e : shape) {
        if (e == 0 || n > (std::size_t{1} << 40) / e) throw InputError("implausible FIFT extents");
        n *= e;
    }
    std::vector<cd> data(n);
    for (auto& z : data) {
        const double re = get_le<double>(in);
        const double im = get_le<double>(in);
        z = {re, im};
    }
    return ComplexTensor(std::move(shape), std::move(data));
}

}  // namespace floquet::num
