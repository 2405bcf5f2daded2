void fmi2DoStep(long param_1, double param_2)
{
  double dVar1 = *(double *)(param_1 + 0x10) - *(double *)(param_1 + 0x18);
  *(double *)(param_1 + 0x20) = dVar1;
  double dVar2 = *(double *)(param_1 + 0x20) - *(double *)(param_1 + 0x28);
  double dVar3 = dVar2 * 6.0;
  *(double *)(param_1 + 0x30) = dVar3;
  double dVar4 = *(double *)(param_1 + 0x20) * 2.0;
  double dVar5 = *(double *)(param_1 + 0x38) * 0.5;
  double dVar6 = dVar4 + dVar5;
  *(double *)(param_1 + 0x40) = dVar6 + *(double *)(param_1 + 0x30);
  if (*(bool *)(param_1 + 0x48)) {
    *(double *)(param_1 + 0x50) = *(double *)(param_1 + 0x40);
  } else {
    *(double *)(param_1 + 0x50) = *(double *)(param_1 + 0x58);
  }
  double dVar7 = *(double *)(param_1 + 0x20) - *(double *)(param_1 + 0x28);
  double dVar8 = dVar7 * 4.0;
  *(double *)(param_1 + 0x28) = *(double *)(param_1 + 0x28) + param_2 * dVar8;
  double dVar9 = *(double *)(param_1 + 0x20) * 0.625;
  double dVar10 = param_2 * dVar9;
  *(double *)(param_1 + 0x38) = *(double *)(param_1 + 0x38) + dVar10;
}

int fmi2GetVersion(int param_1)
{
  return param_1;
}
