#pragma once

#include "seqpred/bitstring.hpp"
#include "seqpred/bounds.hpp"
#include "seqpred/config.hpp"
#include "seqpred/errors.hpp"
#include "seqpred/evaluate.hpp"
#include "seqpred/games.hpp"
#include "seqpred/io.hpp"
#include "seqpred/logprob.hpp"
#include "seqpred/loss.hpp"
#include "seqpred/measure.hpp"
#include "seqpred/model_class.hpp"
#include "seqpred/numeric.hpp"
#include "seqpred/predictor.hpp"
