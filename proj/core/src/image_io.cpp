#include "droso/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "droso/error.hpp"

namespace fs = std::filesystem;

namespace droso {
namespace {

std::string lower_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

bool supported(const fs::path& path) {
    const std::string ext = lower_extension(path);
    return ext == ".pgm" || ext == ".ppm" || ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

// Next header token of a binary PNM, skipping whitespace and # comments.
std::string pnm_token(std::istream& in) {
    std::string token;
    int c = in.get();
    for (;;) {
        while (c != EOF && std::isspace(c)) c = in.get();
        if (c != '#') break;
        while (c != EOF && c != '\n') c = in.get();
    }
    while (c != EOF && !std::isspace(c)) {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    return token;  // the single whitespace after the token is consumed
}

RawFrame read_pnm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string magic = pnm_token(in);
    std::size_t channels = 0;
    if (magic == "P5") channels = 1;
    else if (magic == "P6") channels = 3;
    else throw DataError(path.string() + ": not a binary PGM/PPM (magic '" + magic + "')");

    std::size_t width = 0, height = 0, maxval = 0;
    try {
        width = std::stoul(pnm_token(in));
        height = std::stoul(pnm_token(in));
        maxval = std::stoul(pnm_token(in));
    } catch (const std::exception&) {
        throw DataError(path.string() + ": malformed PNM header");
    }
    if (width == 0 || height == 0 || maxval == 0 || maxval > 255)
        throw DataError(path.string() + ": unsupported PNM dimensions or maxval");

    RawFrame frame(width, height, channels);
    in.read(reinterpret_cast<char*>(frame.pixels.data()), static_cast<std::streamsize>(frame.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(frame.pixels.size()))
        throw DataError(path.string() + ": truncated pixel data");
    if (maxval != 255)
        for (auto& p : frame.pixels) p = static_cast<std::uint8_t>((p * 255 + maxval / 2) / maxval);
    return frame;
}

RawFrame read_png(const fs::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw DataError(path.string() + ": " + image.message);
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    RawFrame frame(image.width, image.height, color ? 3 : 1);
    if (!png_image_finish_read(&image, nullptr, frame.pixels.data(), 0, nullptr)) {
        std::string message = image.message;
        png_image_free(&image);
        throw DataError(path.string() + ": " + message);
    }
    return frame;
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

RawFrame read_jpeg(const fs::path& path) {
    std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.string().c_str(), "rb"), &std::fclose);
    if (!file) throw IoError("cannot open " + path.string());

    jpeg_decompress_struct cinfo{};
    JpegErrorManager err{};
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;

    // No objects with destructors may be created between setjmp and the
    // last libjpeg call.
    RawFrame frame;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DataError(path.string() + ": " + err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);
    frame.width = cinfo.output_width;
    frame.height = cinfo.output_height;
    frame.channels = static_cast<std::size_t>(cinfo.output_components);
    frame.pixels.resize(frame.width * frame.height * frame.channels);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = frame.pixels.data() + cinfo.output_scanline * frame.width * frame.channels;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return frame;
}

}  // namespace

RawFrame read_frame(const fs::path& path) {
    const std::string ext = lower_extension(path);
    RawFrame frame;
    if (ext == ".pgm" || ext == ".ppm") frame = read_pnm(path);
    else if (ext == ".png") frame = read_png(path);
    else if (ext == ".jpg" || ext == ".jpeg") frame = read_jpeg(path);
    else throw DataError(path.string() + ": unsupported image extension");
    frame.validate();
    return frame;
}

void write_pnm(const RawFrame& frame, const fs::path& path) {
    frame.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << (frame.channels == 1 ? "P5" : "P6") << '\n' << frame.width << ' ' << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()), static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<fs::path> list_frames(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && supported(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

std::vector<RawFrame> load_frames(const fs::path& dir) {
    std::vector<RawFrame> frames;
    std::ostringstream failures;
    std::size_t failed = 0;
    for (const fs::path& file : list_frames(dir)) {
        try {
            frames.push_back(read_frame(file));
        } catch (const Error& e) {
            failures << "\n  " << e.what();
            ++failed;
        }
    }
    if (failed > 0)
        throw DataError(std::to_string(failed) + " undecodable frame(s) in " + dir.string() + ":" + failures.str());
    return frames;
}

}  // namespace droso
