#include <neuroseg/png_io.hpp>

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace neuroseg {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& what, const std::string& path) {
    throw InputError(what + ": " + path);
}

void write_png_raw(const std::string& path, int width, int height, int color_type,
                   int bit_depth, const std::vector<png_bytep>& rows) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail("write_png: cannot open", path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail("write_png: init failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail("write_png: init failed", path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail("write_png: libpng error", path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    // No timestamps or variable chunks: identical pixels give identical bytes.
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace

void write_png(const std::string& path, const RasterImage& image) {
    const int color_type = image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
    std::vector<png_bytep> rows(image.height);
    for (int y = 0; y < image.height; ++y)
        rows[y] = const_cast<png_bytep>(image.samples.data() +
                                        static_cast<std::size_t>(y) * image.width * image.channels);
    write_png_raw(path, image.width, image.height, color_type, 8, rows);
}

RasterImage read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail("read_png: cannot open", path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail("read_png: init failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail("read_png: init failed", path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("read_png: libpng error", path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (bit_depth == 16)
        fail("read_png: 16-bit image, use load_label_map", path);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int channels = static_cast<int>(png_get_channels(png, info));
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("read_png: unsupported channel count", path);
    }

    RasterImage image(width, height, channels);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = image.samples.data() + static_cast<std::size_t>(y) * width * channels;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return image;
}

namespace {

std::string rle_sidecar_path(const std::string& png_path) {
    std::filesystem::path p(png_path);
    p.replace_extension(".rle");
    return p.string();
}

void save_label_map_rle(const std::string& path, const InstanceLabelMap& map) {
    std::ofstream out(path);
    if (!out) fail("save_label_map: cannot open", path);
    out << "# neuroseg label runs v1\n";
    out << "dims " << map.width << " " << map.height << "\n";
    for (int y = 0; y < map.height; ++y) {
        int x = 0;
        while (x < map.width) {
            const std::uint32_t l = map.at(x, y);
            int run = 1;
            while (x + run < map.width && map.at(x + run, y) == l) ++run;
            if (l != 0) out << l << " " << x << " " << y << " " << run << "\n";
            x += run;
        }
    }
    if (!out) fail("save_label_map: write failed", path);
}

InstanceLabelMap load_label_map_rle(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("load_label_map: cannot open", path);
    std::string line;
    if (!std::getline(in, line)) fail("load_label_map: empty file", path);
    int width = -1, height = -1;
    if (!std::getline(in, line)) fail("load_label_map: missing dims", path);
    {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag >> width >> height;
        if (tag != "dims" || width < 1 || height < 1)
            fail("load_label_map: malformed dims line", path);
    }
    InstanceLabelMap map(width, height);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::uint32_t label;
        int x, y, run;
        if (!(ss >> label >> x >> y >> run))
            fail("load_label_map: malformed run line", path);
        if (x < 0 || y < 0 || run < 1 || y >= height || x + run > width)
            fail("load_label_map: run out of bounds", path);
        for (int i = 0; i < run; ++i) map.at(x + i, y) = label;
    }
    return map;
}

} // namespace

std::string save_label_map(const std::string& path, const InstanceLabelMap& map) {
    std::uint32_t max_id = 0;
    for (auto l : map.labels) max_id = std::max(max_id, l);
    if (max_id > 65535) {
        const std::string rle = rle_sidecar_path(path);
        save_label_map_rle(rle, map);
        return rle;
    }
    std::vector<std::uint16_t> px(map.labels.size());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint16_t>(map.labels[i]);
    std::vector<png_bytep> rows(map.height);
    for (int y = 0; y < map.height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(px.data() + static_cast<std::size_t>(y) * map.width);
    write_png_raw(path, map.width, map.height, PNG_COLOR_TYPE_GRAY, 16, rows);
    return path;
}

InstanceLabelMap load_label_map(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        const std::string rle = rle_sidecar_path(path);
        if (std::filesystem::exists(rle)) return load_label_map_rle(rle);
        fail("load_label_map: no such file", path);
    }
    if (std::filesystem::path(path).extension() == ".rle") return load_label_map_rle(path);

    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail("load_label_map: cannot open", path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail("load_label_map: init failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail("load_label_map: init failed", path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("load_label_map: libpng error", path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    if (png_get_bit_depth(png, info) != 16 ||
        png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("load_label_map: expected 16-bit gray PNG", path);
    }
    png_set_swap(png);
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    std::vector<std::uint16_t> px(static_cast<std::size_t>(width) * height);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(px.data() + static_cast<std::size_t>(y) * width);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    InstanceLabelMap map(width, height);
    for (std::size_t i = 0; i < px.size(); ++i) map.labels[i] = px[i];
    return map;
}

void save_three_class_mask(const std::string& path, const ThreeClassMask& mask) {
    RasterImage img(mask.width, mask.height, 1);
    img.samples = mask.classes;
    write_png(path, img);
}

ThreeClassMask load_three_class_mask(const std::string& path) {
    const RasterImage img = read_png(path);
    if (img.channels != 1) fail("load_three_class_mask: expected gray PNG", path);
    ThreeClassMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.samples.size(); ++i) {
        if (img.samples[i] > 2) fail("load_three_class_mask: value out of {0,1,2}", path);
        mask.classes[i] = img.samples[i];
    }
    return mask;
}

void save_mask(const std::string& path, const SemanticMask& mask) {
    RasterImage img(mask.width, mask.height, 1);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) img.samples[i] = mask.bits[i] ? 255 : 0;
    write_png(path, img);
}

SemanticMask load_mask(const std::string& path) {
    const RasterImage img = read_png(path);
    if (img.channels != 1) fail("load_mask: expected gray PNG", path);
    SemanticMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.samples.size(); ++i) mask.bits[i] = img.samples[i] >= 128;
    return mask;
}

} // namespace neuroseg
