#include <doctest.h>

#include <numeric>
#include <stdexcept>
#include <vector>

#include "qoslab/media.hpp"

using namespace qoslab;

TEST_CASE("frame_size: frozen values per ladder level (keyframe weight 4)") {
  const EncodingLadder ladder;
  // delta = avg * N / (k + N - 1), key = k * delta, rounded to bytes.
  CHECK(frame_size(ladder.good, false, 4.0) == 10417);
  CHECK(frame_size(ladder.good, true, 4.0) == 41667);
  CHECK(frame_size(ladder.mid, false, 4.0) == 12833);
  CHECK(frame_size(ladder.mid, true, 4.0) == 51333);
  CHECK(frame_size(ladder.poor, false, 4.0) == 10938);
  CHECK(frame_size(ladder.poor, true, 4.0) == 43750);
}

TEST_CASE("frame_size: GOP byte budget matches the configured bitrate") {
  const EncodingLadder ladder;
  for (const EncodingLevel& level : {ladder.good, ladder.mid, ladder.poor}) {
    const long gop_bytes = frame_size(level, true, 4.0) +
                           (level.gop_frames - 1) * frame_size(level, false, 4.0);
    const double gop_seconds =
        static_cast<double>(level.gop_frames) / level.framerate_fps;
    const double kbps = gop_bytes * 8.0 / 1000.0 / gop_seconds;
    CHECK(kbps == doctest::Approx(level.bitrate_kbps).epsilon(0.001));
  }
}

TEST_CASE("next_frame: GOP keyframe cadence and one-shot header flag") {
  EncoderModel enc;
  enc.current = EncodingLadder{}.good;  // GOP 5
  std::vector<FrameDescriptor> frames;
  double t = 0.0;
  for (int i = 0; i < 12; ++i) {
    frames.push_back(next_frame(enc, t));
    t = enc.next_frame_at_ms;
  }
  for (int i = 0; i < 12; ++i) {
    CHECK(frames[i].frame_seq == i);
    CHECK(frames[i].is_keyframe == (i % 5 == 0));
    // Only the very first keyframe carries stream headers.
    CHECK(frames[i].carries_headers == (i == 0));
  }
  CHECK(frames[1].pts_ms == doctest::Approx(1000.0 / 30.0));
}

TEST_CASE("apply_settings: GOP restart, header re-emission, cadence realign") {
  const EncodingLadder ladder;
  EncoderModel enc;
  enc.current = ladder.good;
  (void)next_frame(enc, 0.0);
  (void)next_frame(enc, enc.next_frame_at_ms);
  const uint64_t epoch_before = enc.epoch;

  apply_settings(enc, ladder.poor, 1000.0);
  CHECK(enc.epoch == epoch_before + 1);
  CHECK(enc.next_frame_at_ms == doctest::Approx(1000.0 + 1000.0 / 5.0));
  const FrameDescriptor f = next_frame(enc, enc.next_frame_at_ms);
  CHECK(f.is_keyframe);
  CHECK(f.carries_headers);
  CHECK(f.settings == ladder.poor);

  // Re-applying identical settings still restarts the GOP with headers.
  apply_settings(enc, ladder.poor, 2000.0);
  const FrameDescriptor g = next_frame(enc, enc.next_frame_at_ms);
  CHECK(g.is_keyframe);
  CHECK(g.carries_headers);
}

TEST_CASE("packetize: fragment count, sizes, and error handling") {
  FrameDescriptor frame;
  frame.frame_seq = 7;
  frame.size_bytes = 2500;
  frame.pts_ms = 42.0;
  const auto packets = packetize(frame, 1200);
  REQUIRE(packets.size() == 3);
  CHECK(packets[0].payload_bytes == 1200);
  CHECK(packets[1].payload_bytes == 1200);
  CHECK(packets[2].payload_bytes == 100);
  long total = 0;
  for (const Packet& p : packets) {
    CHECK(p.frame_seq == 7);
    CHECK(p.fragment_count == 3);
    CHECK(p.send_time_ms == doctest::Approx(42.0));
    total += p.payload_bytes;
  }
  CHECK(total == frame.size_bytes);
  CHECK(packets[0].fragment_index == 0);
  CHECK(packets[2].fragment_index == 2);

  frame.size_bytes = 1;
  CHECK(packetize(frame, 1200).size() == 1);
  CHECK_THROWS_AS(packetize(frame, 0), std::invalid_argument);
}

TEST_CASE("transcode: identity pass-through preserves the frame") {
  const EncodingLadder ladder;
  TranscoderState state;
  state.target = ladder.good;
  FrameDescriptor in;
  in.frame_seq = 3;
  in.size_bytes = 41667;
  in.is_keyframe = true;
  in.settings = ladder.good;
  in.watermark_ms = 10.0;
  const auto out = transcode(in, ladder.good, state);
  REQUIRE(out.has_value());
  CHECK(out->frame_seq == 3);
  CHECK(out->size_bytes == 41667);
  CHECK(out->watermark_ms == doctest::Approx(10.0));
}

TEST_CASE("transcode: 30 -> 5 fps keeps every 6th frame at target sizes") {
  const EncodingLadder ladder;
  TranscoderState state;
  state.target = ladder.good;
  set_transcode_target(state, ladder.poor);

  EncoderModel enc;
  enc.current = ladder.good;
  int kept = 0;
  double t = 0.0;
  std::vector<FrameDescriptor> outs;
  for (int i = 0; i < 60; ++i) {  // 2 s of 30 fps input
    FrameDescriptor in = next_frame(enc, t);
    t = enc.next_frame_at_ms;
    if (auto out = transcode(in, ladder.poor, state)) {
      ++kept;
      outs.push_back(*out);
      // Watermark (and thus end-to-end latency attribution) survives.
      CHECK(out->watermark_ms == doctest::Approx(in.watermark_ms));
      CHECK(out->settings == ladder.poor);
    }
  }
  CHECK(kept == 10);  // 60 / (30/5)
  // Output re-GOPs at the target: GOP 5, first frame carries headers.
  CHECK(outs[0].is_keyframe);
  CHECK(outs[0].carries_headers);
  CHECK(outs[5].is_keyframe);
  CHECK_FALSE(outs[5].carries_headers);
  CHECK(outs[0].size_bytes == 43750);
  CHECK(outs[1].size_bytes == 10938);
  for (size_t i = 1; i < outs.size(); ++i) {
    CHECK(outs[i].frame_seq == outs[i - 1].frame_seq + 1);
  }
}

TEST_CASE("transcode: retarget restarts the output GOP with headers") {
  const EncodingLadder ladder;
  TranscoderState state;
  state.target = ladder.poor;
  state.headers_pending = false;
  state.frames_into_gop = 3;
  state.in_count = 2;

  set_transcode_target(state, ladder.poor);  // no-op on equal target
  CHECK(state.frames_into_gop == 3);

  set_transcode_target(state, ladder.mid);
  CHECK(state.frames_into_gop == 0);
  CHECK(state.in_count == 0);
  CHECK(state.headers_pending);
}

TEST_CASE("extract_watermark recovers end-to-end latency") {
  FrameDescriptor f;
  f.watermark_ms = 120.0;
  CHECK(extract_watermark(f, 300.0) == doctest::Approx(180.0));
}
