// Copyright 2026 The glomnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// @file image_io.h
/// @brief Raster file I/O.
///
/// PNG is read and written losslessly and is the format of every artifact
/// the pipeline produces. Baseline TIFF (8-bit, uncompressed or deflate,
/// chunky, single image) is accepted for ingest only. The format is chosen
/// from the file signature, not the extension.

#ifndef GLOMNET_IMGCORE_IMAGE_IO_H_
#define GLOMNET_IMGCORE_IMAGE_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>

#include "glomnet/imgcore/image.h"

namespace glomnet {

/// Decodes a PNG or TIFF file. Grayscale stays single-channel; alpha is
/// dropped; palettes are expanded to RGB; 16-bit samples are reduced to 8.
Image load_image(const std::filesystem::path& path);

/// Decodes an in-memory PNG or TIFF byte stream.
Image decode_image(std::span<const std::uint8_t> bytes);

/// Writes `img` as PNG. Output bytes are a deterministic function of the
/// image (fixed compression settings, no timestamps).
void save_image(const Image& img, const std::filesystem::path& path);

}  // namespace glomnet

#endif  // GLOMNET_IMGCORE_IMAGE_IO_H_
