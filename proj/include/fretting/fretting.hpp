#pragma once

#include "fretting/arranger.hpp"
#include "fretting/chunking.hpp"
#include "fretting/core.hpp"
#include "fretting/dataset.hpp"
#include "fretting/difficulty.hpp"
#include "fretting/encodings.hpp"
#include "fretting/errors.hpp"
#include "fretting/evaluation.hpp"
#include "fretting/interchange.hpp"
#include "fretting/io.hpp"
#include "fretting/midi.hpp"
#include "fretting/postprocess.hpp"
#include "fretting/timing.hpp"
#include "fretting/tokens.hpp"
#include "fretting/vocabulary.hpp"
