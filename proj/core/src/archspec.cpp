#include "mrct/archspec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace mrct::arch {

std::string_view to_string(LayerKind k) {
    switch (k) {
    case LayerKind::C7S1: return "C7S1";
    case LayerKind::DOWN: return "DOWN";
    case LayerKind::RES: return "RES";
    case LayerKind::UP: return "UP";
    case LayerKind::DISC_C: return "DISC_C";
    case LayerKind::FINAL_CONV: return "FINAL_CONV";
    }
    return "";
}

std::string_view to_string(Role r) {
    return r == Role::GENERATOR ? "generator" : "discriminator";
}

LayerSpec LayerSpec::make(LayerKind kind, int filters) {
    switch (kind) {
    case LayerKind::C7S1: return {kind, filters, 7, {1, 1}};
    case LayerKind::DOWN: return {kind, filters, 3, {2, 1}};
    case LayerKind::RES: return {kind, filters, 3, {1, 1}};
    case LayerKind::UP: return {kind, filters, 3, {1, 2}};
    case LayerKind::DISC_C: return {kind, filters, 4, {2, 1}};
    case LayerKind::FINAL_CONV: return {kind, 1, 4, {1, 1}};
    }
    return {};
}

std::string to_string(const TensorShape& s) {
    return std::to_string(s.height) + "x" + std::to_string(s.width) + "x" +
           std::to_string(s.channels);
}

namespace {

std::optional<std::int64_t> parse_positive(std::string_view digits) {
    if (digits.empty()) return std::nullopt;
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || value <= 0)
        return std::nullopt;
    return value;
}

bool is_separator(char c) { return c == ',' || c == '-' || c == ' ' || c == '\t'; }

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (is_separator(text[pos])) {
            ++pos;
            continue;
        }
        std::size_t start = pos;
        // c7s1-k carries its own hyphen.
        if (text.substr(pos).starts_with("c7s1-")) pos += 5;
        while (pos < text.size() && !is_separator(text[pos])) ++pos;
        tokens.emplace_back(text.substr(start, pos - start));
    }
    return tokens;
}

// Splits "R256x9" / "R256×9" / "R256*9" into ("256", 9).
std::pair<std::string_view, std::optional<std::int64_t>> split_repeat(std::string_view body,
                                                                      bool& malformed) {
    static constexpr std::string_view kTimes = "\xC3\x97";  // U+00D7
    std::size_t at = body.find(kTimes);
    std::size_t marker_len = kTimes.size();
    if (at == std::string_view::npos) {
        at = body.find_first_of("x*");
        marker_len = 1;
    }
    if (at == std::string_view::npos) return {body, std::nullopt};
    const auto count = parse_positive(body.substr(at + marker_len));
    if (!count) malformed = true;
    return {body.substr(0, at), count};
}

}  // namespace

TensorShape parse_chw(std::string_view text) {
    std::vector<std::int64_t> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t x = text.find_first_of("xX", start);
        const auto part = parse_positive(text.substr(start, x == std::string_view::npos
                                                                ? std::string_view::npos
                                                                : x - start));
        if (!part) throw Error("shape: expected CxHxW with positive integers, got '" +
                               std::string(text) + "'");
        parts.push_back(*part);
        if (x == std::string_view::npos) break;
        start = x + 1;
    }
    if (parts.size() != 3)
        throw Error("shape: expected CxHxW, got '" + std::string(text) + "'");
    return {parts[1], parts[2], parts[0]};
}

Role infer_role(std::string_view text) {
    const auto tokens = tokenize(text);
    if (!tokens.empty() && tokens.front().size() > 1 && tokens.front()[0] == 'C' &&
        std::isdigit(static_cast<unsigned char>(tokens.front()[1])))
        return Role::DISCRIMINATOR;
    return Role::GENERATOR;
}

ArchSpec parse_arch(std::string_view text, Role role, const ParseOptions& opts) {
    if (opts.last_disc_stride != 1 && opts.last_disc_stride != 2)
        throw Error("arch: last discriminator stride must be 1 or 2");
    const auto tokens = tokenize(text);
    if (tokens.empty()) throw Error("arch: empty architecture string");

    ArchSpec spec;
    spec.role = role;
    bool saw_final = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& tok = tokens[i];
        const std::size_t index = i + 1;
        const std::string where = " (token " + std::to_string(index) + ")";
        auto fail = [&](const std::string& what) -> ParseError {
            return ParseError("arch: " + what + " '" + tok + "'" + where, index, tok);
        };
        if (saw_final) throw fail("token after final layer");

        LayerKind kind;
        std::string_view body;
        if (tok == "final") {
            kind = LayerKind::FINAL_CONV;
        } else if (tok.starts_with("c7s1-")) {
            kind = LayerKind::C7S1;
            body = std::string_view(tok).substr(5);
        } else if (tok.size() > 1 && std::isdigit(static_cast<unsigned char>(tok[1])) &&
                   std::string_view("dRuC").find(tok[0]) != std::string_view::npos) {
            body = std::string_view(tok).substr(1);
            switch (tok[0]) {
            case 'd': kind = LayerKind::DOWN; break;
            case 'R': kind = LayerKind::RES; break;
            case 'u': kind = LayerKind::UP; break;
            default: kind = LayerKind::DISC_C; break;
            }
        } else {
            throw fail("unknown token");
        }

        std::int64_t repeat = 1;
        if (kind == LayerKind::RES) {
            bool malformed = false;
            const auto [filters, count] = split_repeat(body, malformed);
            if (malformed) throw fail("malformed repeat count in");
            body = filters;
            if (count) repeat = *count;
        }
        std::int64_t filters = 1;
        if (kind != LayerKind::FINAL_CONV) {
            const auto parsed = parse_positive(body);
            if (!parsed || *parsed > (1 << 20)) throw fail("malformed filter count in");
            filters = *parsed;
        }

        const bool disc_token = kind == LayerKind::DISC_C || kind == LayerKind::FINAL_CONV;
        if (disc_token != (role == Role::DISCRIMINATOR))
            throw fail(std::string("token not valid for a ") + std::string(to_string(role)) + ":");

        for (std::int64_t r = 0; r < repeat; ++r)
            spec.layers.push_back(LayerSpec::make(kind, static_cast<int>(filters)));
        saw_final = kind == LayerKind::FINAL_CONV;
    }

    if (role == Role::DISCRIMINATOR) {
        if (!saw_final) spec.layers.push_back(LayerSpec::make(LayerKind::FINAL_CONV, 1));
        auto last_c = std::find_if(spec.layers.rbegin(), spec.layers.rend(),
                                   [](const LayerSpec& l) { return l.kind == LayerKind::DISC_C; });
        if (last_c != spec.layers.rend()) last_c->stride = {opts.last_disc_stride, 1};
    }
    return spec;
}

std::string to_notation(const ArchSpec& spec) {
    std::string out;
    for (const auto& l : spec.layers) {
        if (!out.empty()) out += ',';
        const std::string k = std::to_string(l.filters);
        switch (l.kind) {
        case LayerKind::C7S1: out += "c7s1-" + k; break;
        case LayerKind::DOWN: out += "d" + k; break;
        case LayerKind::RES: out += "R" + k; break;
        case LayerKind::UP: out += "u" + k; break;
        case LayerKind::DISC_C: out += "C" + k; break;
        case LayerKind::FINAL_CONV: out += "final"; break;
        }
    }
    return out;
}

TensorShape layer_output_shape(const LayerSpec& layer, const TensorShape& in) {
    if (in.height <= 0 || in.width <= 0 || in.channels <= 0)
        throw Error("arch: input shape must be positive, got " + to_string(in));
    auto halve = [](std::int64_t v) { return (v + 1) / 2; };
    TensorShape out = in;
    switch (layer.kind) {
    case LayerKind::C7S1:
        out.channels = layer.filters;
        break;
    case LayerKind::DOWN:
        out = {halve(in.height), halve(in.width), layer.filters};
        break;
    case LayerKind::RES:
        if (in.channels != layer.filters)
            throw Error("arch: residual block R" + std::to_string(layer.filters) + " receives " +
                        std::to_string(in.channels) + " channels");
        break;
    case LayerKind::UP:
        out = {2 * in.height, 2 * in.width, layer.filters};
        break;
    case LayerKind::DISC_C:
        if (layer.stride.num == 2) {
            out = {halve(in.height), halve(in.width), layer.filters};
        } else {
            out = {in.height - 1, in.width - 1, layer.filters};
        }
        break;
    case LayerKind::FINAL_CONV:
        // kernel 4, stride 1, pad 1
        out = {in.height - 1, in.width - 1, 1};
        break;
    }
    if (out.height <= 0 || out.width <= 0)
        throw Error("arch: spatial underflow at " + std::string(to_string(layer.kind)) +
                    " layer with input " + to_string(in));
    return out;
}

std::vector<TensorShape> trace_shapes(const ArchSpec& spec, const TensorShape& input) {
    std::vector<TensorShape> shapes;
    shapes.reserve(spec.layers.size());
    TensorShape cur = input;
    for (const auto& l : spec.layers) {
        cur = layer_output_shape(l, cur);
        shapes.push_back(cur);
    }
    return shapes;
}

TensorShape output_shape(const ArchSpec& spec, const TensorShape& input) {
    TensorShape cur = input;
    for (const auto& l : spec.layers) cur = layer_output_shape(l, cur);
    return cur;
}

std::int64_t layer_param_count(const LayerSpec& l, std::int64_t in) {
    const std::int64_t k2 = std::int64_t{l.kernel} * l.kernel;
    const std::int64_t out = l.filters;
    if (l.kind == LayerKind::RES) return 2 * (out * out * k2 + out);
    return in * out * k2 + out;
}

std::int64_t param_count(const ArchSpec& spec, std::int64_t input_channels) {
    std::int64_t total = 0;
    std::int64_t channels = input_channels;
    for (const auto& l : spec.layers) {
        total += layer_param_count(l, channels);
        channels = l.filters;
    }
    return total;
}

std::int64_t receptive_field(const ArchSpec& spec) {
    if (spec.role != Role::DISCRIMINATOR)
        throw Error("arch: receptive field is defined for discriminators only");
    std::int64_t r = 1;
    for (auto it = spec.layers.rbegin(); it != spec.layers.rend(); ++it) {
        if (it->stride.den != 1) throw Error("arch: fractional stride in discriminator");
        const std::int64_t s = it->stride.num;
        r = r * s + (it->kernel - s);
    }
    return r;
}

ResolutionCheck validate_resolution(const ArchSpec& spec, std::int64_t input_size) {
    if (spec.role != Role::GENERATOR)
        throw Error("arch: resolution rule applies to generators only");
    ResolutionCheck check;
    check.residual_blocks = static_cast<int>(std::count_if(
        spec.layers.begin(), spec.layers.end(),
        [](const LayerSpec& l) { return l.kind == LayerKind::RES; }));
    const std::string size = std::to_string(input_size) + "x" + std::to_string(input_size);
    if (input_size == 128) {
        check.expected_blocks = 6;
    } else if (input_size >= 256) {
        check.expected_blocks = 9;
    } else {
        check.message = "no residual-block rule for " + size +
                        " inputs (6 blocks for 128x128, 9 for 256x256 and larger)";
        return check;
    }
    check.ok = check.residual_blocks == *check.expected_blocks;
    check.message = check.ok ? "ok: " + std::to_string(check.residual_blocks) +
                                   " residual blocks for " + size
                             : "expected " + std::to_string(*check.expected_blocks) +
                                   " residual blocks for " + size + " input, found " +
                                   std::to_string(check.residual_blocks);
    return check;
}

}  // namespace mrct::arch
