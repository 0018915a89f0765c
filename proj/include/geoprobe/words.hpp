// Copyright 2026 The geoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// SPDX-License-Identifier: Apache-2.0
//
// Pinned 200-word list for the circled-letter task: lowercase, 5-10
// letters each. The list is part of the dataset contract; changing it
// changes generated datasets, so it is frozen and covered by tests.

#pragma once

#include <array>

namespace geoprobe {

inline constexpr std::array<const char*, 200> kWordList = {
    "anchor", "apple", "barrel", "basket", "beach", "bottle",
    "bread", "brick", "bridge", "brush", "bucket", "button",
    "cabbage", "camera", "candle", "candy", "canyon", "carpet",
    "carrot", "castle", "cellar", "chair", "cheese", "cherry",
    "circle", "cloud", "coast", "coffee", "copper", "corner",
    "cotton", "cradle", "crystal", "dance", "desert", "dinner",
    "donkey", "dragon", "dream", "eagle", "earth", "engine",
    "fabric", "falcon", "feather", "fence", "field", "finger",
    "flame", "flower", "forest", "fountain", "garden", "garlic",
    "giant", "ginger", "glass", "globe", "grape", "grass",
    "groove", "guitar", "hammer", "harbor", "heart", "hedge",
    "honey", "horizon", "horse", "house", "hunter", "island",
    "jacket", "jungle", "kettle", "kitchen", "knight", "ladder",
    "lantern", "laptop", "leather", "lemon", "library", "lizard",
    "lobster", "locker", "lunch", "magnet", "maple", "marble",
    "market", "meadow", "melon", "metal", "mirror", "monkey",
    "morning", "mountain", "muscle", "museum", "music", "needle",
    "night", "ocean", "office", "onion", "orange", "orchard",
    "oyster", "paint", "palace", "paper", "parrot", "pasta",
    "peach", "pearl", "pencil", "pepper", "piano", "pillow",
    "pilot", "planet", "plant", "plastic", "plate", "pocket",
    "poetry", "potato", "powder", "prairie", "prince", "puzzle",
    "rabbit", "radio", "rainbow", "raisin", "river", "rocket",
    "rubber", "saddle", "salmon", "sandal", "scarf", "school",
    "season", "shadow", "shelf", "shell", "silver", "singer",
    "sketch", "smile", "snake", "soccer", "socket", "spider",
    "spiral", "spoon", "spring", "stable", "statue", "steam",
    "stone", "storm", "street", "sugar", "summer", "sunset",
    "table", "tailor", "temple", "thunder", "ticket", "tiger",
    "timber", "toast", "tomato", "tower", "train", "treasure",
    "tunnel", "turtle", "valley", "velvet", "village", "violet",
    "violin", "wagon", "walnut", "water", "whale", "wheat",
    "window", "winter", "wisdom", "wizard", "wonder", "yellow",
    "zebra", "zigzag",};

}  // namespace geoprobe
