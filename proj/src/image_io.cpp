#include "vidiff/image_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace vidiff {

FrameFormat frame_format_from_string(const std::string& s) {
    if (s == "pgm") return FrameFormat::pgm;
    if (s == "png") return FrameFormat::png;
    throw std::invalid_argument("unknown frame format: " + s);
}

std::string to_string(FrameFormat format) {
    return format == FrameFormat::pgm ? "pgm" : "png";
}

std::vector<uint8_t> quantize_frame(const Tensor& frame) {
    std::vector<double> gray(static_cast<size_t>(frame.h) * frame.w);
    double mn = 1e300;
    double mx = -1e300;
    for (int i = 0; i < frame.h; ++i) {
        for (int j = 0; j < frame.w; ++j) {
            double acc = 0.0;
            for (int ch = 0; ch < frame.c; ++ch) acc += frame.at(i, j, ch);
            const double g = acc / frame.c;
            gray[static_cast<size_t>(i) * frame.w + j] = g;
            mn = std::min(mn, g);
            mx = std::max(mx, g);
        }
    }
    std::vector<uint8_t> out(gray.size());
    if (mx - mn <= 0.0) {
        std::fill(out.begin(), out.end(), static_cast<uint8_t>(128));
        return out;
    }
    const double scale = 255.0 / (mx - mn);
    for (size_t i = 0; i < gray.size(); ++i) {
        out[i] = static_cast<uint8_t>(std::llround((gray[i] - mn) * scale));
    }
    return out;
}

void write_pgm(const std::string& path, int h, int w, const std::vector<uint8_t>& gray) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_pgm: cannot open " + path);
    f << "P5\n" << w << " " << h << "\n255\n";
    f.write(reinterpret_cast<const char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
    if (!f) throw std::runtime_error("write_pgm: write failed for " + path);
}

namespace {

uint32_t crc32_bytes(const uint8_t* data, size_t n, uint32_t crc = 0xFFFFFFFFu) {
    static const std::array<uint32_t, 256> table = [] {
        std::array<uint32_t, 256> t{};
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int k = 0; k < 8; ++k) {
                c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            }
            t[i] = c;
        }
        return t;
    }();
    for (size_t i = 0; i < n; ++i) {
        crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
    }
    return crc;
}

uint32_t adler32(const std::vector<uint8_t>& data) {
    uint32_t a = 1;
    uint32_t b = 0;
    for (uint8_t byte : data) {
        a = (a + byte) % 65521u;
        b = (b + a) % 65521u;
    }
    return (b << 16) | a;
}

void put_u32_be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void append_chunk(std::vector<uint8_t>& out, const char type[4],
                  const std::vector<uint8_t>& payload) {
    put_u32_be(out, static_cast<uint32_t>(payload.size()));
    std::vector<uint8_t> body(type, type + 4);
    body.insert(body.end(), payload.begin(), payload.end());
    out.insert(out.end(), body.begin(), body.end());
    put_u32_be(out, crc32_bytes(body.data(), body.size()) ^ 0xFFFFFFFFu);
}

// zlib stream with stored (uncompressed) deflate blocks.
std::vector<uint8_t> zlib_store(const std::vector<uint8_t>& raw) {
    std::vector<uint8_t> z;
    z.push_back(0x78);
    z.push_back(0x01);
    size_t off = 0;
    do {
        const size_t len = std::min<size_t>(raw.size() - off, 65535);
        const bool final_block = off + len == raw.size();
        z.push_back(final_block ? 0x01 : 0x00);
        z.push_back(static_cast<uint8_t>(len & 0xFF));
        z.push_back(static_cast<uint8_t>(len >> 8));
        z.push_back(static_cast<uint8_t>(~len & 0xFF));
        z.push_back(static_cast<uint8_t>((~len >> 8) & 0xFF));
        z.insert(z.end(), raw.begin() + off, raw.begin() + off + len);
        off += len;
    } while (off < raw.size());
    put_u32_be(z, adler32(raw));
    return z;
}

}  // namespace

void write_png_gray(const std::string& path, int h, int w, const std::vector<uint8_t>& gray) {
    if (static_cast<size_t>(h) * w != gray.size()) {
        throw std::invalid_argument("write_png_gray: pixel count mismatch");
    }
    std::vector<uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

    std::vector<uint8_t> ihdr;
    put_u32_be(ihdr, static_cast<uint32_t>(w));
    put_u32_be(ihdr, static_cast<uint32_t>(h));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);  // deflate
    ihdr.push_back(0);  // filter method
    ihdr.push_back(0);  // no interlace
    append_chunk(png, "IHDR", ihdr);

    std::vector<uint8_t> raw;
    raw.reserve(static_cast<size_t>(h) * (w + 1));
    for (int i = 0; i < h; ++i) {
        raw.push_back(0);  // filter: none
        raw.insert(raw.end(), gray.begin() + static_cast<size_t>(i) * w,
                   gray.begin() + static_cast<size_t>(i + 1) * w);
    }
    append_chunk(png, "IDAT", zlib_store(raw));
    append_chunk(png, "IEND", {});

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_png_gray: cannot open " + path);
    f.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
    if (!f) throw std::runtime_error("write_png_gray: write failed for " + path);
}

std::vector<std::string> write_frames(const FrameSequence& frames, const std::string& directory,
                                      FrameFormat format) {
    frames.validate();
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw std::runtime_error("write_frames: cannot create directory " + directory);

    std::vector<std::string> paths;
    paths.reserve(frames.frames.size());
    for (int k = 0; k < frames.m(); ++k) {
        const Tensor& frame = frames.frames[k];
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%03d.%s", k,
                      format == FrameFormat::pgm ? "pgm" : "png");
        const std::string path = (fs::path(directory) / name).string();
        const std::vector<uint8_t> gray = quantize_frame(frame);
        if (format == FrameFormat::pgm) {
            write_pgm(path, frame.h, frame.w, gray);
        } else {
            write_png_gray(path, frame.h, frame.w, gray);
        }
        paths.push_back(path);
    }
    return paths;
}

namespace {

int next_pnm_token(std::istream& in) {
    // Skips whitespace and '#' comments, then reads one integer.
    for (;;) {
        const int ch = in.peek();
        if (ch == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(ch)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    if (!(in >> value)) throw std::runtime_error("read_pgm: malformed header");
    return value;
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_pgm: cannot open " + path);
    std::string magic(2, '\0');
    f.read(magic.data(), 2);
    if (magic != "P5") throw std::runtime_error("read_pgm: not a binary PGM: " + path);

    GrayImage img;
    img.w = next_pnm_token(f);
    img.h = next_pnm_token(f);
    const int maxval = next_pnm_token(f);
    if (img.w < 1 || img.h < 1 || maxval < 1 || maxval > 255) {
        throw std::runtime_error("read_pgm: unsupported header in " + path);
    }
    f.get();  // single whitespace after maxval
    img.pixels.resize(static_cast<size_t>(img.w) * img.h);
    f.read(reinterpret_cast<char*>(img.pixels.data()),
           static_cast<std::streamsize>(img.pixels.size()));
    if (!f) throw std::runtime_error("read_pgm: truncated pixel data in " + path);
    return img;
}

FrameSequence read_frame_directory(const std::string& directory) {
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(directory)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("frame_", 0) == 0 && entry.path().extension() == ".pgm") {
            paths.push_back(entry.path().string());
        }
    }
    if (paths.empty()) {
        throw std::runtime_error("read_frame_directory: no frame_*.pgm files in " + directory);
    }
    std::sort(paths.begin(), paths.end());

    FrameSequence seq;
    seq.t = 0;
    for (const std::string& path : paths) {
        const GrayImage img = read_pgm(path);
        Tensor frame(img.h, img.w, 1);
        for (size_t i = 0; i < img.pixels.size(); ++i) {
            frame.v[i] = img.pixels[i] / 255.0;
        }
        seq.frames.push_back(std::move(frame));
    }
    seq.validate();
    return seq;
}

std::vector<ForegroundMask> read_mask_directory(const std::string& directory, int m, int h,
                                                int w) {
    std::vector<ForegroundMask> masks;
    masks.reserve(m);
    for (int k = 0; k < m; ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "mask_%03d.pgm", k);
        const std::string path = (fs::path(directory) / name).string();
        const GrayImage img = read_pgm(path);
        if (img.h != h || img.w != w) {
            throw std::invalid_argument("mask " + path + ": dimensions must equal latent dims");
        }
        ForegroundMask mask(h, w);
        for (size_t i = 0; i < img.pixels.size(); ++i) {
            mask.m[i] = img.pixels[i] >= 128 ? 1 : 0;
        }
        masks.push_back(std::move(mask));
    }
    return masks;
}

}  // namespace vidiff
