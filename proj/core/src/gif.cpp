#include "sketchanim/gif.hpp"

#include "sketchanim/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace sketchanim {

namespace {

using Color = std::array<std::uint8_t, 3>;

std::uint32_t pack(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 16) | (static_cast<std::uint32_t>(p[1]) << 8) | p[2];
}

Color unpack(std::uint32_t c) {
  return {static_cast<std::uint8_t>(c >> 16), static_cast<std::uint8_t>(c >> 8),
          static_cast<std::uint8_t>(c)};
}

struct Entry {
  std::uint32_t color;
  std::uint64_t count;
};

struct Box {
  std::size_t begin;
  std::size_t end;
};

int channel(std::uint32_t c, int ch) { return (c >> (16 - 8 * ch)) & 0xff; }

class BitWriter {
 public:
  explicit BitWriter(Bytes& out) : out_(out) {}
  void write(int code, int width) {
    acc_ |= static_cast<std::uint32_t>(code) << bits_;
    bits_ += width;
    while (bits_ >= 8) {
      push(static_cast<std::uint8_t>(acc_ & 0xff));
      acc_ >>= 8;
      bits_ -= 8;
    }
  }
  void finish() {
    if (bits_ > 0) push(static_cast<std::uint8_t>(acc_ & 0xff));
    flush_block();
    out_.push_back(0);  // block terminator
  }

 private:
  void push(std::uint8_t b) {
    block_.push_back(b);
    if (block_.size() == 255) flush_block();
  }
  void flush_block() {
    if (block_.empty()) return;
    out_.push_back(static_cast<std::uint8_t>(block_.size()));
    out_.insert(out_.end(), block_.begin(), block_.end());
    block_.clear();
  }

  Bytes& out_;
  std::vector<std::uint8_t> block_;
  std::uint32_t acc_ = 0;
  int bits_ = 0;
};

void lzw_encode(const std::vector<std::uint8_t>& indices, int min_code_size, Bytes& out) {
  out.push_back(static_cast<std::uint8_t>(min_code_size));
  BitWriter w(out);
  const int clear = 1 << min_code_size;
  const int eoi = clear + 1;
  std::unordered_map<std::uint32_t, int> dict;
  int next_code = eoi + 1;
  int width = min_code_size + 1;
  w.write(clear, width);
  if (indices.empty()) {
    w.write(eoi, width);
    w.finish();
    return;
  }
  int prefix = indices[0];
  for (std::size_t i = 1; i < indices.size(); ++i) {
    const std::uint8_t k = indices[i];
    const std::uint32_t key = (static_cast<std::uint32_t>(prefix) << 8) | k;
    const auto it = dict.find(key);
    if (it != dict.end()) {
      prefix = it->second;
      continue;
    }
    w.write(prefix, width);
    if (next_code < 4096) {
      dict.emplace(key, next_code);
      // The decoder widens one code later than it adds, so widen once the
      // code just assigned no longer fits.
      if (next_code == (1 << width) && width < 12) ++width;
      ++next_code;
    } else {
      w.write(clear, width);
      dict.clear();
      next_code = eoi + 1;
      width = min_code_size + 1;
    }
    prefix = k;
  }
  w.write(prefix, width);
  w.write(eoi, width);
  w.finish();
}

void put16(Bytes& out, int v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

}  // namespace

int gif_delay_cs(double frame_time) {
  return std::max(2, static_cast<int>(std::lround(frame_time * 100.0)));
}

std::vector<Color> median_cut_palette(std::span<const RasterImage> frames, int max_colors) {
  std::map<std::uint32_t, std::uint64_t> histogram;
  for (const RasterImage& f : frames)
    for (int y = 0; y < f.height(); ++y)
      for (int x = 0; x < f.width(); ++x) {
        const std::uint8_t* p = f.pixel(x, y);
        if (p[3] != 0) ++histogram[pack(p)];
      }
  std::vector<Entry> entries;
  entries.reserve(histogram.size());
  for (const auto& [c, n] : histogram) entries.push_back({c, n});
  std::vector<Color> palette;
  if (entries.empty() || max_colors <= 0) return palette;
  if (static_cast<int>(entries.size()) <= max_colors) {
    for (const Entry& e : entries) palette.push_back(unpack(e.color));
    return palette;
  }

  std::vector<Box> boxes{{0, entries.size()}};
  auto range_of = [&](const Box& b, int& axis) {
    int best = -1;
    for (int ch = 0; ch < 3; ++ch) {
      int lo = 255, hi = 0;
      for (std::size_t i = b.begin; i < b.end; ++i) {
        lo = std::min(lo, channel(entries[i].color, ch));
        hi = std::max(hi, channel(entries[i].color, ch));
      }
      if (hi - lo > best) {
        best = hi - lo;
        axis = ch;
      }
    }
    return best;
  };
  while (static_cast<int>(boxes.size()) < max_colors) {
    int pick = -1, pick_axis = 0, pick_range = 0;
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      if (boxes[b].end - boxes[b].begin < 2) continue;
      int axis = 0;
      const int r = range_of(boxes[b], axis);
      if (r > pick_range) {
        pick_range = r;
        pick = static_cast<int>(b);
        pick_axis = axis;
      }
    }
    if (pick < 0) break;
    Box& box = boxes[pick];
    std::stable_sort(entries.begin() + box.begin, entries.begin() + box.end,
                     [&](const Entry& a, const Entry& b) {
                       return channel(a.color, pick_axis) < channel(b.color, pick_axis);
                     });
    std::uint64_t total = 0;
    for (std::size_t i = box.begin; i < box.end; ++i) total += entries[i].count;
    std::uint64_t acc = 0;
    std::size_t split = box.begin + 1;
    for (std::size_t i = box.begin; i < box.end - 1; ++i) {
      acc += entries[i].count;
      split = i + 1;
      if (2 * acc >= total) break;
    }
    const Box upper{split, box.end};
    box.end = split;
    boxes.push_back(upper);
  }
  for (const Box& b : boxes) {
    double sum[3] = {0, 0, 0};
    double weight = 0;
    for (std::size_t i = b.begin; i < b.end; ++i) {
      for (int ch = 0; ch < 3; ++ch) sum[ch] += channel(entries[i].color, ch) * double(entries[i].count);
      weight += double(entries[i].count);
    }
    palette.push_back({static_cast<std::uint8_t>(std::lround(sum[0] / weight)),
                       static_cast<std::uint8_t>(std::lround(sum[1] / weight)),
                       static_cast<std::uint8_t>(std::lround(sum[2] / weight))});
  }
  return palette;
}

Bytes encode_gif(std::span<const RasterImage> frames, double frame_time) {
  if (frames.empty()) throw Error(ErrorKind::validation, "GIF needs at least one frame");
  const int w = frames[0].width(), h = frames[0].height();
  if (w > 0xffff || h > 0xffff) throw Error(ErrorKind::validation, "frame too large for GIF");
  bool any_transparent = false;
  for (const RasterImage& f : frames) {
    if (f.width() != w || f.height() != h)
      throw Error(ErrorKind::validation, "GIF frames must share dimensions");
    for (int y = 0; y < h && !any_transparent; ++y)
      for (int x = 0; x < w && !any_transparent; ++x) any_transparent = f.pixel(x, y)[3] == 0;
  }
  auto palette = median_cut_palette(frames, any_transparent ? 255 : 256);
  if (palette.empty()) palette.push_back({0, 0, 0});
  const int transparent_index = any_transparent ? static_cast<int>(palette.size()) : -1;
  if (any_transparent) palette.push_back({0, 0, 0});
  int table_bits = 1;
  while ((1 << table_bits) < static_cast<int>(palette.size())) ++table_bits;

  Bytes out = {'G', 'I', 'F', '8', '9', 'a'};
  put16(out, w);
  put16(out, h);
  out.push_back(static_cast<std::uint8_t>(0x80 | ((table_bits - 1) << 4) | (table_bits - 1)));
  out.push_back(0);  // background colour index
  out.push_back(0);  // pixel aspect
  for (int i = 0; i < (1 << table_bits); ++i) {
    const Color c = i < static_cast<int>(palette.size()) ? palette[i] : Color{0, 0, 0};
    out.insert(out.end(), c.begin(), c.end());
  }
  // NETSCAPE2.0 application extension, loop forever.
  const std::uint8_t netscape[] = {0x21, 0xff, 0x0b, 'N', 'E', 'T', 'S', 'C', 'A', 'P', 'E',
                                   '2',  '.',  '0',  0x03, 0x01, 0x00, 0x00, 0x00};
  out.insert(out.end(), std::begin(netscape), std::end(netscape));

  const int opaque_colors = transparent_index >= 0 ? transparent_index : static_cast<int>(palette.size());
  std::unordered_map<std::uint32_t, std::uint8_t> lookup;
  auto nearest = [&](std::uint32_t c) {
    const auto it = lookup.find(c);
    if (it != lookup.end()) return it->second;
    int best = 0;
    long best_d = -1;
    for (int i = 0; i < opaque_colors; ++i) {
      long d = 0;
      for (int ch = 0; ch < 3; ++ch) {
        const long diff = channel(c, ch) - palette[i][ch];
        d += diff * diff;
      }
      if (best_d < 0 || d < best_d) {
        best_d = d;
        best = i;
      }
    }
    lookup.emplace(c, static_cast<std::uint8_t>(best));
    return static_cast<std::uint8_t>(best);
  };

  const int delay = gif_delay_cs(frame_time);
  const int min_code_size = std::max(2, table_bits);
  std::vector<std::uint8_t> indices(static_cast<std::size_t>(w) * h);
  for (const RasterImage& f : frames) {
    // Graphic control extension; disposal 2 restores the background so
    // transparent frames do not accumulate.
    out.insert(out.end(), {0x21, 0xf9, 0x04});
    const std::uint8_t disposal = transparent_index >= 0 ? 2 : 1;
    out.push_back(static_cast<std::uint8_t>((disposal << 2) | (transparent_index >= 0 ? 1 : 0)));
    put16(out, delay);
    out.push_back(static_cast<std::uint8_t>(transparent_index >= 0 ? transparent_index : 0));
    out.push_back(0);

    out.push_back(0x2c);
    put16(out, 0);
    put16(out, 0);
    put16(out, w);
    put16(out, h);
    out.push_back(0);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::uint8_t* p = f.pixel(x, y);
        indices[static_cast<std::size_t>(y) * w + x] =
            p[3] == 0 && transparent_index >= 0 ? static_cast<std::uint8_t>(transparent_index)
                                                : nearest(pack(p));
      }
    lzw_encode(indices, min_code_size, out);
  }
  out.push_back(0x3b);
  return out;
}

namespace {

class GifReader {
 public:
  explicit GifReader(std::span<const std::uint8_t> b) : bytes_(b) {}
  std::uint8_t u8() {
    if (pos_ >= bytes_.size()) fail("unexpected end of stream");
    return bytes_[pos_++];
  }
  int u16() {
    const int lo = u8();
    return lo | (u8() << 8);
  }
  std::vector<std::uint8_t> sub_blocks() {
    std::vector<std::uint8_t> data;
    while (true) {
      const int n = u8();
      if (n == 0) return data;
      for (int i = 0; i < n; ++i) data.push_back(u8());
    }
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::decode, "gif: " + msg + " at byte offset " + std::to_string(pos_));
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> lzw_decode(const std::vector<std::uint8_t>& data, int min_code_size,
                                     std::size_t pixel_count, const GifReader& reader) {
  const int clear = 1 << min_code_size;
  const int eoi = clear + 1;
  std::vector<std::vector<std::uint8_t>> table;
  auto reset = [&] {
    table.assign(clear + 2, {});
    for (int i = 0; i < clear; ++i) table[i] = {static_cast<std::uint8_t>(i)};
  };
  reset();
  int width = min_code_size + 1;
  std::vector<std::uint8_t> out;
  out.reserve(pixel_count);
  std::size_t bit = 0;
  int prev = -1;
  while (bit + width <= data.size() * 8) {
    int code = 0;
    for (int k = 0; k < width; ++k, ++bit)
      if (data[bit / 8] & (1 << (bit % 8))) code |= 1 << k;
    if (code == clear) {
      reset();
      width = min_code_size + 1;
      prev = -1;
      continue;
    }
    if (code == eoi) break;
    std::vector<std::uint8_t> entry;
    if (code < static_cast<int>(table.size())) {
      entry = table[code];
      if (prev >= 0 && table.size() < 4096) {
        auto added = table[prev];
        added.push_back(entry[0]);
        table.push_back(std::move(added));
      }
    } else if (code == static_cast<int>(table.size()) && prev >= 0) {
      entry = table[prev];
      entry.push_back(entry[0]);
      if (table.size() < 4096) table.push_back(entry);
    } else {
      reader.fail("invalid LZW code");
    }
    out.insert(out.end(), entry.begin(), entry.end());
    prev = code;
    if (static_cast<int>(table.size()) == (1 << width) && width < 12) ++width;
  }
  if (out.size() < pixel_count) reader.fail("image data too short");
  out.resize(pixel_count);
  return out;
}

}  // namespace

DecodedGif decode_gif(std::span<const std::uint8_t> bytes) {
  GifReader r(bytes);
  std::string sig;
  for (int i = 0; i < 6; ++i) sig.push_back(static_cast<char>(r.u8()));
  if (sig != "GIF89a" && sig != "GIF87a") r.fail("bad signature");
  DecodedGif gif;
  gif.width = r.u16();
  gif.height = r.u16();
  if (gif.width == 0 || gif.height == 0) r.fail("zero-sized screen");
  const int flags = r.u8();
  const int bg_index = r.u8();
  r.u8();
  std::vector<Color> global;
  if (flags & 0x80) {
    const int n = 1 << ((flags & 7) + 1);
    for (int i = 0; i < n; ++i) global.push_back({r.u8(), r.u8(), r.u8()});
  }
  (void)bg_index;
  RasterImage canvas(gif.width, gif.height, 0);
  int transparent = -1;
  int delay = 0;
  int disposal = 0;
  while (true) {
    const int block = r.u8();
    if (block == 0x3b) break;
    if (block == 0x21) {
      const int label = r.u8();
      const auto data = r.sub_blocks();
      if (label == 0xf9 && data.size() >= 4) {
        disposal = (data[0] >> 2) & 7;
        delay = data[1] | (data[2] << 8);
        transparent = (data[0] & 1) ? data[3] : -1;
      } else if (label == 0xff && data.size() >= 11 &&
                 std::string(data.begin(), data.begin() + 11) == "NETSCAPE2.0") {
        gif.loops = true;
      }
      continue;
    }
    if (block != 0x2c) r.fail("unknown block");
    const int ix = r.u16(), iy = r.u16(), iw = r.u16(), ih = r.u16();
    const int iflags = r.u8();
    std::vector<Color> local;
    if (iflags & 0x80) {
      const int n = 1 << ((iflags & 7) + 1);
      for (int i = 0; i < n; ++i) local.push_back({r.u8(), r.u8(), r.u8()});
    }
    const auto& palette = local.empty() ? global : local;
    const int min_code = r.u8();
    if (min_code < 2 || min_code > 11) r.fail("bad LZW code size");
    const auto data = r.sub_blocks();
    const auto idx = lzw_decode(data, min_code, static_cast<std::size_t>(iw) * ih, r);
    std::vector<int> rows(ih);
    if (iflags & 0x40) {
      int k = 0;
      for (int start : {0, 4, 2, 1})
        for (int y = start; y < ih; y += (start == 0 ? 8 : start == 4 ? 8 : start == 2 ? 4 : 2)) rows[k++] = y;
    } else {
      for (int y = 0; y < ih; ++y) rows[y] = y;
    }
    RasterImage before = canvas;
    for (int k = 0; k < ih; ++k)
      for (int x = 0; x < iw; ++x) {
        const int cx = ix + x, cy = iy + rows[k];
        if (cx >= gif.width || cy >= gif.height) continue;
        const int c = idx[static_cast<std::size_t>(k) * iw + x];
        if (c == transparent) continue;
        if (c >= static_cast<int>(palette.size())) r.fail("palette index out of range");
        canvas.set(cx, cy, palette[c][0], palette[c][1], palette[c][2], 255);
      }
    gif.frames.push_back(canvas);
    gif.delays_cs.push_back(delay);
    if (disposal == 2) {
      for (int y = iy; y < std::min(iy + ih, gif.height); ++y)
        for (int x = ix; x < std::min(ix + iw, gif.width); ++x) canvas.set(x, y, 0, 0, 0, 0);
    } else if (disposal == 3) {
      canvas = before;
    }
    transparent = -1;
    delay = 0;
    disposal = 0;
  }
  return gif;
}

}  // namespace sketchanim
