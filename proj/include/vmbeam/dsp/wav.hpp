// vmbeam/dsp/wav.hpp
//
// Copyright 2026 vmbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VMBEAM_DSP_WAV_HPP_
#define VMBEAM_DSP_WAV_HPP_

#include <string>

#include "vmbeam/dsp/stft.hpp"

namespace vmbeam::dsp {

// RIFF/WAVE, interleaved multichannel. 16 kHz is enforced on read and write;
// anything else is a data error. pcm16 is scaled by 32768 and clamped;
// float32 truncates to single precision; float64 round-trips bit-exactly.
enum class WavFormat { pcm16, float32, float64 };

void write_wav(const std::string& path, const MultiWave& wave,
               WavFormat format);
MultiWave read_wav(const std::string& path);

}  // namespace vmbeam::dsp

#endif  // VMBEAM_DSP_WAV_HPP_
