#include "qoslab/media.hpp"

#include <cmath>
#include <stdexcept>

namespace qoslab {

long frame_size(const EncodingLevel& settings, bool is_keyframe,
                double keyframe_weight) {
  const double n = static_cast<double>(settings.gop_frames);
  const double k = keyframe_weight;
  const double avg_bits =
      settings.bitrate_kbps * 1000.0 / settings.framerate_fps;
  const double delta_bits = avg_bits * n / (k + n - 1.0);
  const double bits = is_keyframe ? k * delta_bits : delta_bits;
  return std::max<long>(1, std::llround(bits / 8.0));
}

FrameDescriptor next_frame(EncoderModel& enc, double now_ms) {
  FrameDescriptor frame;
  frame.frame_seq = enc.next_seq++;
  frame.is_keyframe = enc.frames_into_gop == 0;
  frame.carries_headers = frame.is_keyframe && enc.headers_pending;
  if (frame.carries_headers) enc.headers_pending = false;
  frame.settings = enc.current;
  frame.size_bytes = frame_size(enc.current, frame.is_keyframe, enc.keyframe_weight);
  frame.watermark_ms = now_ms;
  frame.pts_ms = now_ms;
  enc.frames_into_gop = (enc.frames_into_gop + 1) % enc.current.gop_frames;
  enc.next_frame_at_ms = now_ms + 1000.0 / enc.current.framerate_fps;
  return frame;
}

void apply_settings(EncoderModel& enc, const EncodingLevel& settings,
                    double now_ms) {
  enc.current = settings;
  enc.frames_into_gop = 0;
  enc.headers_pending = true;
  enc.next_frame_at_ms = now_ms + 1000.0 / settings.framerate_fps;
  ++enc.epoch;
}

std::vector<Packet> packetize(const FrameDescriptor& frame,
                              long mtu_payload_bytes) {
  if (mtu_payload_bytes < 1) throw std::invalid_argument("packetize: mtu < 1");
  const int count =
      static_cast<int>((frame.size_bytes + mtu_payload_bytes - 1) / mtu_payload_bytes);
  std::vector<Packet> packets;
  packets.reserve(count);
  long remaining = frame.size_bytes;
  for (int i = 0; i < count; ++i) {
    Packet p;
    p.payload_bytes = std::min(remaining, mtu_payload_bytes);
    p.frame_seq = frame.frame_seq;
    p.fragment_index = i;
    p.fragment_count = count;
    p.send_time_ms = frame.pts_ms;
    remaining -= p.payload_bytes;
    packets.push_back(p);
  }
  return packets;
}

void set_transcode_target(TranscoderState& state, const EncodingLevel& target) {
  if (state.target == target) return;
  state.target = target;
  state.in_count = 0;
  state.frames_into_gop = 0;
  state.headers_pending = true;
}

std::optional<FrameDescriptor> transcode(const FrameDescriptor& in,
                                         const EncodingLevel& target,
                                         TranscoderState& state) {
  set_transcode_target(state, target);
  if (in.settings == target) {
    ++state.in_count;
    return in;  // identity pass-through
  }
  const long ratio =
      std::max(1, in.settings.framerate_fps / target.framerate_fps);
  const bool keep = state.in_count % ratio == 0;
  ++state.in_count;
  if (!keep) return std::nullopt;

  FrameDescriptor out;
  out.frame_seq = state.next_seq++;
  out.is_keyframe = state.frames_into_gop == 0;
  out.carries_headers = out.is_keyframe && state.headers_pending;
  if (out.carries_headers) state.headers_pending = false;
  out.settings = target;
  out.size_bytes = frame_size(target, out.is_keyframe, state.keyframe_weight);
  out.watermark_ms = in.watermark_ms;  // end-to-end stamp survives transcoding
  out.pts_ms = in.pts_ms;
  state.frames_into_gop = (state.frames_into_gop + 1) % target.gop_frames;
  return out;
}

double extract_watermark(const FrameDescriptor& frame, double arrival_ms) {
  return arrival_ms - frame.watermark_ms;
}

}  // namespace qoslab
