/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

typedef void (*copy_fn_t)(void *dst, const void *src, uint32_t len);

void save_token(TEE_Param params[4])
{
    uint8_t token[64];
    copy_fn_t copy = TEE_MemMove;

    copy(token, params[0].memref.buffer, params[0].memref.size);
}
