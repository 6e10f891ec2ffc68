#pragma once

#include "tnorm/corpus.hpp"
#include "tnorm/embeddings.hpp"
#include "tnorm/errors.hpp"
#include "tnorm/evaluation.hpp"
#include "tnorm/matcher.hpp"
#include "tnorm/parallel.hpp"
#include "tnorm/phonetics.hpp"
#include "tnorm/similarity.hpp"
#include "tnorm/textsim.hpp"
#include "tnorm/tuner.hpp"
#include "tnorm/unicode.hpp"
#include "tnorm/word.hpp"
