// tensor.hpp — Row-major complex tensors, contraction and the FIFT binary format

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "floquet_if/types.hpp"

namespace floquet::num {

/// Dense complex tensor with row-major storage.
///
/// Storage is shared and immutable, so copies and reshapes are cheap and
/// never alias mutable state. Shape changes only touch metadata.
class ComplexTensor {
public:
    using Shape = std::vector<std::size_t>;

    ComplexTensor();
    ComplexTensor(Shape shape, std::vector<cd> data);
    /// Zero-filled tensor.
    explicit ComplexTensor(Shape shape);

    static ComplexTensor from_matrix(const Matrix& m);
    static ComplexTensor from_matrix(const Matrix& m, Shape shape);
    static ComplexTensor from_vector(const Vector& v);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_->size(); }
    std::span<const cd> data() const noexcept { return {data_->data(), data_->size()}; }

    cd at(std::span<const std::size_t> index) const;
    cd at(std::initializer_list<std::size_t> index) const {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }

    /// Same entries, new extents. The product of extents must be unchanged.
    ComplexTensor reshape(Shape new_shape) const;
    /// Index permutation: result axis i is input axis axes[i].
    ComplexTensor permute(std::span<const std::size_t> axes) const;

    /// Matrix view grouping the first `row_axes` axes into rows.
    Matrix as_matrix(std::size_t row_axes) const;
    /// Matrix view of a rank-2 tensor.
    Matrix as_matrix() const;

    double frobenius_norm() const;

    friend bool operator==(const ComplexTensor& a, const ComplexTensor& b);

private:
    Shape shape_;
    std::shared_ptr<const std::vector<cd>> data_;
};

/// Index pair (axis of a, axis of b) summed over in `contract`.
using AxisPair = std::pair<std::size_t, std::size_t>;

/// Sum over the paired axes. Result axes are the unpaired axes of a, then those of b.
ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                       std::span<const AxisPair> pairs);
inline ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                              std::initializer_list<AxisPair> pairs) {
    return contract(a, b, std::span<const AxisPair>(pairs.begin(), pairs.size()));
}

// ---------------------------------------------------------------------------
// Binary format: "FIFT", u32 version, u32 rank, u64 extents, then (re, im)
// little-endian IEEE-754 doubles in row-major order.

inline constexpr std::uint32_t kTensorFormatVersion = 1;

void write_tensor(std::ostream& out, const ComplexTensor& t);
ComplexTensor read_tensor(std::istream& in);

}  // namespace floquet::num
