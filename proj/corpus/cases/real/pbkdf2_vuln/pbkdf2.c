/* Copyright 2026 The SymTEE Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#include <tee_internal_api.h>

TEE_Result g_CryptoTaPbkdf_PBKDF2(const char *pwd, uint32_t pwdLen,
                                  const char *salt, uint32_t saltLen,
                                  char *output, int dkLen)
{
    char resultBuf[512];
    TEE_OperationHandle op = TEE_HANDLE_NULL;

    if (output == NULL)
        return TEE_ERROR_BAD_PARAMETERS;

    (void)pwd;
    (void)pwdLen;
    (void)salt;
    (void)saltLen;
    (void)op;
    TEE_MemMove(output, resultBuf, dkLen);
    return TEE_SUCCESS;
}
