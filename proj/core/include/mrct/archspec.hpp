#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrct/error.hpp"

namespace mrct::arch {

/// Layer families of the compact CycleGAN notation.
///   C7S1  c7s1-k  7x7 conv, stride 1
///   DOWN  dk      3x3 conv, stride 2
///   RES   Rk      residual block of two 3x3 convs
///   UP    uk      3x3 fractional-strided conv, stride 1/2
///   DISC_C Ck     4x4 conv, stride 2 (stride 1 in the PatchGAN variant)
///   FINAL_CONV    4x4 conv, stride 1, one output channel
enum class LayerKind { C7S1, DOWN, RES, UP, DISC_C, FINAL_CONV };

enum class Role { GENERATOR, DISCRIMINATOR };

std::string_view to_string(LayerKind k);
std::string_view to_string(Role r);

/// Positive rational stride; {1, 2} for fractional-strided layers.
struct Stride {
    int num = 1;
    int den = 1;
    friend bool operator==(const Stride&, const Stride&) = default;
};

struct LayerSpec {
    LayerKind kind = LayerKind::C7S1;
    int filters = 1;
    int kernel = 7;
    Stride stride;

    /// Canonical layer for `kind` with `filters` output channels.
    static LayerSpec make(LayerKind kind, int filters);

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct ArchSpec {
    Role role = Role::GENERATOR;
    std::vector<LayerSpec> layers;

    friend bool operator==(const ArchSpec&, const ArchSpec&) = default;
};

struct TensorShape {
    std::int64_t height = 0;
    std::int64_t width = 0;
    std::int64_t channels = 0;

    friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

std::string to_string(const TensorShape& s);  // "HxWxC"
/// Parses "CxHxW" (channels first), e.g. "3x256x256".
TensorShape parse_chw(std::string_view text);

/// Raised for malformed notation; `token_index` is 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t token_index, std::string token)
        : Error(message), token_index_(token_index), token_(std::move(token)) {}
    std::size_t token_index() const noexcept { return token_index_; }
    const std::string& token() const noexcept { return token_; }

private:
    std::size_t token_index_;
    std::string token_;
};

struct ParseOptions {
    /// Stride of the last Ck layer (the C512 of the standard discriminator).
    /// 2 follows the notation literally; 1 gives the 70x70 PatchGAN.
    int last_disc_stride = 2;
};

/// Parses a comma-, hyphen-, or space-separated token list, e.g.
/// "c7s1-64,d128,d256,R256x9,u128,u64,c7s1-3" or "C64-C128-C256-C512".
/// `Rk×N` / `RkxN` repeats a residual block N times. A discriminator gets an
/// implicit trailing FINAL_CONV when the `final` token is absent.
ArchSpec parse_arch(std::string_view text, Role role, const ParseOptions& opts = {});

/// Guesses the role from the first token: Ck means discriminator.
Role infer_role(std::string_view text);

/// Canonical comma-separated form, one token per layer; parse_arch of the
/// result (with the same options) round-trips to an equal ArchSpec.
std::string to_notation(const ArchSpec& spec);

/// Output of one layer. Throws mrct::Error on dimension underflow or a
/// residual block whose filter count differs from its input channels.
TensorShape layer_output_shape(const LayerSpec& layer, const TensorShape& input);
TensorShape output_shape(const ArchSpec& spec, const TensorShape& input);

/// Shape after each layer, in order.
std::vector<TensorShape> trace_shapes(const ArchSpec& spec, const TensorShape& input);

/// Weights + biases of one layer given its input channel count.
std::int64_t layer_param_count(const LayerSpec& layer, std::int64_t input_channels);
/// Sum of conv weights and biases; InstanceNorm counts zero parameters.
std::int64_t param_count(const ArchSpec& spec, std::int64_t input_channels);

/// Receptive field at the input of a discriminator, by the backward
/// recurrence r <- r*s + (k - s). Throws for generator specs.
std::int64_t receptive_field(const ArchSpec& spec);

struct ResolutionCheck {
    bool ok = false;
    int residual_blocks = 0;
    std::optional<int> expected_blocks;
    std::string message;
};

/// Six residual blocks go with 128x128 inputs, nine with 256x256 and larger.
ResolutionCheck validate_resolution(const ArchSpec& spec, std::int64_t input_size);

}  // namespace mrct::arch
