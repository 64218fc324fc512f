#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "scenetext/errors.hpp"

namespace scenetext {

enum class Colorspace { Srgb8, LinearRgb, Lab, Gray };

/// Row-major, channel-interleaved pixel grid. The universal carrier for
/// backgrounds, masks-as-images, glyph alphas and outputs.
template <typename T>
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    Colorspace colorspace = Colorspace::Gray;
    std::vector<T> data;

    Image() = default;
    Image(int w, int h, int c, Colorspace cs, T fill = T{})
        : width(w), height(h), channels(c), colorspace(cs),
          data(static_cast<size_t>(w) * h * c, fill) {}

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    size_t index(int x, int y, int c = 0) const {
        return (static_cast<size_t>(y) * width + x) * channels + c;
    }
    T& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
    const T& at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }
    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
    bool same_size(const Image& o) const { return width == o.width && height == o.height; }
};

using ImageU8 = Image<uint8_t>;
using ImageF32 = Image<float>;

struct LabPixel {
    float L = 0.f;  // [0,100]
    float a = 0.f;
    float b = 0.f;
};

namespace detail {

// sRGB transfer function (IEC 61966-2-1).
inline double srgb_decode(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}
inline double srgb_encode(double v) {
    return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

inline const std::array<double, 256>& srgb_decode_lut() {
    static const std::array<double, 256> lut = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) t[i] = srgb_decode(i / 255.0);
        return t;
    }();
    return lut;
}

// sRGB -> XYZ (D65). The white point below is the exact row sums of this
// matrix so that r=g=b inputs land exactly on the gray axis (a=b=0).
inline constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};
inline constexpr double kWhiteX = 0.4124564 + 0.3575761 + 0.1804375;
inline constexpr double kWhiteY = 0.2126729 + 0.7151522 + 0.0721750;
inline constexpr double kWhiteZ = 0.0193339 + 0.1191920 + 0.9503041;

inline constexpr double kXyzToRgb[3][3] = {
    { 3.2404542, -1.5371385, -0.4985314},
    {-0.9692660,  1.8760108,  0.0415560},
    { 0.0556434, -0.2040259,  1.0572252},
};

inline constexpr double kLabEps = 216.0 / 24389.0;   // (6/29)^3
inline constexpr double kLabKappa = 24389.0 / 27.0;  // (29/3)^3

inline double lab_f(double t) {
    return t > kLabEps ? std::cbrt(t) : (kLabKappa * t + 16.0) / 116.0;
}
inline double lab_f_inv(double ft) {
    double t3 = ft * ft * ft;
    return t3 > kLabEps ? t3 : (116.0 * ft - 16.0) / kLabKappa;
}

} // namespace detail

/// CIE L*a*b* of one 8-bit sRGB pixel (D65).
inline LabPixel lab_from_srgb(uint8_t r, uint8_t g, uint8_t b) {
    using namespace detail;
    const auto& lut = srgb_decode_lut();
    double lr = lut[r], lg = lut[g], lb = lut[b];
    double x = kRgbToXyz[0][0] * lr + kRgbToXyz[0][1] * lg + kRgbToXyz[0][2] * lb;
    double y = kRgbToXyz[1][0] * lr + kRgbToXyz[1][1] * lg + kRgbToXyz[1][2] * lb;
    double z = kRgbToXyz[2][0] * lr + kRgbToXyz[2][1] * lg + kRgbToXyz[2][2] * lb;
    double fx = lab_f(x / kWhiteX), fy = lab_f(y / kWhiteY), fz = lab_f(z / kWhiteZ);
    LabPixel out;
    out.L = static_cast<float>(116.0 * fy - 16.0);
    out.a = static_cast<float>(500.0 * (fx - fy));
    out.b = static_cast<float>(200.0 * (fy - fz));
    return out;
}

/// Linear-light RGB of a Lab color, clamped to [0,1] (out-of-gamut clamps).
inline std::array<double, 3> linear_rgb_from_lab(const LabPixel& p) {
    using namespace detail;
    double fy = (p.L + 16.0) / 116.0;
    double fx = fy + p.a / 500.0;
    double fz = fy - p.b / 200.0;
    double x = lab_f_inv(fx) * kWhiteX;
    double y = lab_f_inv(fy) * kWhiteY;
    double z = lab_f_inv(fz) * kWhiteZ;
    std::array<double, 3> rgb{};
    for (int c = 0; c < 3; ++c) {
        double v = kXyzToRgb[c][0] * x + kXyzToRgb[c][1] * y + kXyzToRgb[c][2] * z;
        rgb[c] = std::clamp(v, 0.0, 1.0);
    }
    return rgb;
}

inline std::array<uint8_t, 3> srgb_from_lab(const LabPixel& p) {
    auto rgb = linear_rgb_from_lab(p);
    std::array<uint8_t, 3> out{};
    for (int c = 0; c < 3; ++c) {
        double v = detail::srgb_encode(rgb[c]) * 255.0;
        out[c] = static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    return out;
}

inline ImageF32 srgb_to_lab(const ImageU8& img) {
    if (img.channels != 3)
        throw InvalidChannelCount("srgb_to_lab expects a 3-channel image, got " +
                                  std::to_string(img.channels));
    ImageF32 out(img.width, img.height, 3, Colorspace::Lab);
    const size_t n = img.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        LabPixel p = lab_from_srgb(img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2]);
        out.data[3 * i] = p.L;
        out.data[3 * i + 1] = p.a;
        out.data[3 * i + 2] = p.b;
    }
    return out;
}

inline ImageU8 lab_to_srgb(const ImageF32& img) {
    if (img.channels != 3 || img.colorspace != Colorspace::Lab)
        throw InvalidChannelCount("lab_to_srgb expects a 3-channel Lab image");
    ImageU8 out(img.width, img.height, 3, Colorspace::Srgb8);
    const size_t n = img.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        LabPixel p{img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2]};
        auto rgb = srgb_from_lab(p);
        out.data[3 * i] = rgb[0];
        out.data[3 * i + 1] = rgb[1];
        out.data[3 * i + 2] = rgb[2];
    }
    return out;
}

/// Luma gray in [0,1] (BT.601 weights on encoded values, the usual CV
/// convention for feature extraction).
inline ImageF32 to_gray(const ImageU8& img) {
    ImageF32 out(img.width, img.height, 1, Colorspace::Gray);
    const size_t n = img.pixel_count();
    if (img.channels == 1) {
        for (size_t i = 0; i < n; ++i) out.data[i] = img.data[i] / 255.f;
    } else if (img.channels == 3) {
        for (size_t i = 0; i < n; ++i) {
            out.data[i] = (0.299f * img.data[3 * i] + 0.587f * img.data[3 * i + 1] +
                           0.114f * img.data[3 * i + 2]) / 255.f;
        }
    } else {
        throw InvalidChannelCount("to_gray expects 1 or 3 channels");
    }
    return out;
}

struct GradientField {
    ImageF32 gx, gy, magnitude, orientation;  // orientation in [0,pi)
    int width() const { return gx.width; }
    int height() const { return gx.height; }
};

/// 3x3 Sobel with replicate borders, normalized by 1/8 so a unit ramp
/// I(x,y)=x yields gx=1 at interior pixels.
inline GradientField sobel_gradients(const ImageF32& img) {
    if (img.channels != 1)
        throw InvalidChannelCount("sobel_gradients expects a single-channel image");
    if (img.width < 3 || img.height < 3)
        throw ImageTooSmall("sobel_gradients needs at least a 3x3 image");
    const int w = img.width, h = img.height;
    GradientField g;
    g.gx = ImageF32(w, h, 1, Colorspace::Gray);
    g.gy = ImageF32(w, h, 1, Colorspace::Gray);
    g.magnitude = ImageF32(w, h, 1, Colorspace::Gray);
    g.orientation = ImageF32(w, h, 1, Colorspace::Gray);
    auto pix = [&](int x, int y) {
        x = std::clamp(x, 0, w - 1);
        y = std::clamp(y, 0, h - 1);
        return img.data[static_cast<size_t>(y) * w + x];
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float p00 = pix(x - 1, y - 1), p10 = pix(x, y - 1), p20 = pix(x + 1, y - 1);
            float p01 = pix(x - 1, y),                          p21 = pix(x + 1, y);
            float p02 = pix(x - 1, y + 1), p12 = pix(x, y + 1), p22 = pix(x + 1, y + 1);
            float gx = ((p20 + 2.f * p21 + p22) - (p00 + 2.f * p01 + p02)) / 8.f;
            float gy = ((p02 + 2.f * p12 + p22) - (p00 + 2.f * p10 + p20)) / 8.f;
            size_t i = static_cast<size_t>(y) * w + x;
            g.gx.data[i] = gx;
            g.gy.data[i] = gy;
            g.magnitude.data[i] = std::sqrt(gx * gx + gy * gy);
            float ang = std::atan2(gy, gx);
            if (ang < 0.f) ang += static_cast<float>(M_PI);
            if (ang >= static_cast<float>(M_PI)) ang -= static_cast<float>(M_PI);
            g.orientation.data[i] = ang;
        }
    }
    return g;
}

/// Bilinear resize with pixel-center alignment; clamped sampling.
inline ImageF32 resize_bilinear(const ImageF32& src, int dst_w, int dst_h) {
    ImageF32 dst(dst_w, dst_h, src.channels, src.colorspace);
    const double sx = static_cast<double>(src.width) / dst_w;
    const double sy = static_cast<double>(src.height) / dst_h;
    for (int y = 0; y < dst_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        int y0c = std::clamp(y0, 0, src.height - 1);
        int y1c = std::clamp(y0 + 1, 0, src.height - 1);
        for (int x = 0; x < dst_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            int x0c = std::clamp(x0, 0, src.width - 1);
            int x1c = std::clamp(x0 + 1, 0, src.width - 1);
            for (int c = 0; c < src.channels; ++c) {
                double v00 = src.at(x0c, y0c, c), v10 = src.at(x1c, y0c, c);
                double v01 = src.at(x0c, y1c, c), v11 = src.at(x1c, y1c, c);
                double v = (1 - wy) * ((1 - wx) * v00 + wx * v10) +
                           wy * ((1 - wx) * v01 + wx * v11);
                dst.at(x, y, c) = static_cast<float>(v);
            }
        }
    }
    return dst;
}

} // namespace scenetext
