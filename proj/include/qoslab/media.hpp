#pragma once

#include <optional>
#include <vector>

#include "qoslab/rate_control.hpp"

namespace qoslab {

// A modeled video frame. No pixel data: size, timing and the settings it
// was encoded with are all the simulation needs.
struct FrameDescriptor {
  long frame_seq = 0;
  long size_bytes = 0;
  bool is_keyframe = false;
  bool carries_headers = false;  // implies is_keyframe
  EncodingLevel settings;
  double watermark_ms = 0.0;  // virtual send time stamped into the image
  double pts_ms = 0.0;
};

// Deterministic frame-size model. With GOP length N and key:delta weight k,
// delta frames get avg * N / (k + N - 1) bits and keyframes k times that,
// so the GOP mean equals the configured bitrate exactly.
long frame_size(const EncodingLevel& settings, bool is_keyframe,
                double keyframe_weight);

struct EncoderModel {
  EncodingLevel current;
  int frames_into_gop = 0;
  double keyframe_weight = 4.0;
  double next_frame_at_ms = 0.0;
  long next_seq = 0;
  bool headers_pending = true;  // next keyframe carries SPS/PPS-style headers
  uint64_t epoch = 0;           // bumped on every settings change
};

// Emits the frame due at now_ms and advances the encoder clock by one
// frame interval. Keyframe iff at a GOP boundary.
FrameDescriptor next_frame(EncoderModel& enc, double now_ms);

// Applies new settings: restarts the GOP (even when new == current) so the
// very next frame is a header-carrying keyframe, and realigns the frame
// cadence to the new framerate starting one interval from now.
void apply_settings(EncoderModel& enc, const EncodingLevel& settings,
                    double now_ms);

struct Packet {
  long payload_bytes = 0;
  long frame_seq = 0;
  int fragment_index = 0;
  int fragment_count = 0;
  double send_time_ms = 0.0;
};

// MTU fragmentation: ceil(size/mtu) fragments, all mtu-sized except
// possibly the last; fragment sizes sum to the frame size.
std::vector<Packet> packetize(const FrameDescriptor& frame,
                              long mtu_payload_bytes);

// Relay-side transcoder: re-emits an incoming stream at a target level by
// subsampling frames to the target framerate and re-sizing/re-GOPing them.
struct TranscoderState {
  EncodingLevel target;
  double keyframe_weight = 4.0;
  long in_count = 0;   // incoming frames since last retarget
  int frames_into_gop = 0;
  long next_seq = 0;
  bool headers_pending = true;
};

// Switches the transcoder target; restarts the output GOP when it changes.
void set_transcode_target(TranscoderState& state, const EncodingLevel& target);

// Returns the re-emitted frame, or nothing when the input frame is
// subsampled away. Identity pass-through when target == incoming settings.
std::optional<FrameDescriptor> transcode(const FrameDescriptor& in,
                                         const EncodingLevel& target,
                                         TranscoderState& state);

// End-to-end latency recovered from the watermark stamp.
double extract_watermark(const FrameDescriptor& frame, double arrival_ms);

}  // namespace qoslab
