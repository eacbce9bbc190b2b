#include "sketchanim/image_io.hpp"

#include "sketchanim/error.hpp"

#include <png.h>
// jpeglib.h expects size_t and FILE to be declared first.
#include <cstdio>
#include <jpeglib.h>

#include <csetjmp>
#include <cstring>
#include <fstream>
#include <string>

namespace sketchanim {

namespace {

constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

struct PngReader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
  std::string error;
};

void png_read_cb(png_structp png, png_bytep out, png_size_t len) {
  auto* r = static_cast<PngReader*>(png_get_io_ptr(png));
  if (r->pos + len > r->bytes.size()) png_error(png, "unexpected end of stream");
  std::memcpy(out, r->bytes.data() + r->pos, len);
  r->pos += len;
}

void png_error_cb(png_structp png, png_const_charp msg) {
  auto* r = static_cast<PngReader*>(png_get_io_ptr(png));
  if (r) r->error = msg;
  png_longjmp(png, 1);
}

void png_warning_cb(png_structp, png_const_charp) {}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;
};

// Decodes to either gray (1 channel) or RGBA (4 channels).
DecodedPng decode_png_raw(std::span<const std::uint8_t> bytes, bool keep_gray) {
  PngReader reader{bytes, 0, {}};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorKind::decode, "png: out of memory");
  png_infop info = png_create_info_struct(png);
  DecodedPng out;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::decode, "png: " + reader.error + " at byte offset " +
                                       std::to_string(reader.pos));
  }
  png_set_error_fn(png, &reader, png_error_cb, png_warning_cb);
  png_set_read_fn(png, &reader, png_read_cb);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if ((color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) && depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  const bool gray_out = keep_gray && color == PNG_COLOR_TYPE_GRAY &&
                        !png_get_valid(png, info, PNG_INFO_tRNS);
  if (!gray_out) {
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
      png_set_gray_to_rgb(png);
    png_set_filler(png, 0xff, PNG_FILLER_AFTER);
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = gray_out ? 1 : 4;
  const std::size_t stride = static_cast<std::size_t>(out.width) * out.channels;
  if (png_get_rowbytes(png, info) != stride) png_error(png, "unexpected row layout");
  out.data.resize(stride * out.height);
  rows.resize(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.data.data() + stride * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

RasterImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo{};
  JpegError err{};
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  // Warnings such as premature end of data are promoted to errors.
  err.mgr.emit_message = [](j_common_ptr cinfo, int level) {
    if (level < 0) jpeg_error_exit(cinfo);
  };
  std::vector<std::uint8_t> rgba;
  std::vector<std::uint8_t> row;
  int width = 0;
  int height = 0;
  if (setjmp(err.jump)) {
    const std::size_t consumed =
        cinfo.src ? bytes.size() - cinfo.src->bytes_in_buffer : 0;
    jpeg_destroy_decompress(&cinfo);
    throw Error(ErrorKind::decode, std::string("jpeg: ") + err.message + " at byte offset " +
                                       std::to_string(consumed));
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, const_cast<unsigned char*>(bytes.data()),
               static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  rgba.resize(static_cast<std::size_t>(width) * height * 4);
  row.resize(static_cast<std::size_t>(width) * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    const int y = static_cast<int>(cinfo.output_scanline);
    JSAMPROW ptr = row.data();
    jpeg_read_scanlines(&cinfo, &ptr, 1);
    std::uint8_t* dst = rgba.data() + static_cast<std::size_t>(y) * width * 4;
    for (int x = 0; x < width; ++x) {
      dst[4 * x + 0] = row[3 * x + 0];
      dst[4 * x + 1] = row[3 * x + 1];
      dst[4 * x + 2] = row[3 * x + 2];
      dst[4 * x + 3] = 255;
    }
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return RasterImage(width, height, std::move(rgba));
}

void png_write_cb(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void png_flush_cb(png_structp) {}

void png_write_error_cb(png_structp png, png_const_charp) { png_longjmp(png, 1); }

Bytes encode_png_raw(int width, int height, int channels, const std::uint8_t* data) {
  Bytes out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_write_error_cb,
                                            png_warning_cb);
  if (!png) throw Error(ErrorKind::io, "png: out of memory");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::io, "png: encode failed");
  }
  png_set_write_fn(png, &out, png_write_cb, png_flush_cb);
  png_set_IHDR(png, info, width, height, 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) rows[y] = const_cast<png_bytep>(data + stride * y);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSig, 8) == 0;
}

bool is_jpeg(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff;
}

}  // namespace

RasterImage decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) {
    DecodedPng png = decode_png_raw(bytes, false);
    return RasterImage(png.width, png.height, std::move(png.data));
  }
  if (is_jpeg(bytes)) return decode_jpeg(bytes);
  throw Error(ErrorKind::decode, "unrecognised image format at byte offset 0");
}

GrayImage decode_gray_png(std::span<const std::uint8_t> bytes) {
  if (!is_png(bytes)) throw Error(ErrorKind::decode, "not a PNG stream at byte offset 0");
  DecodedPng png = decode_png_raw(bytes, true);
  if (png.channels == 1) return GrayImage(png.width, png.height, std::move(png.data));
  return to_grayscale(RasterImage(png.width, png.height, std::move(png.data)));
}

Bytes encode_png(const RasterImage& img) {
  return encode_png_raw(img.width(), img.height(), 4, img.data().data());
}

Bytes encode_png(const GrayImage& img) {
  return encode_png_raw(img.width(), img.height(), 1, img.data().data());
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

}  // namespace sketchanim
