#include <stdio.h>
double compute(double size[], int lo)
{
    double z = 0.0;
    int k;
    for (k = 0; k < lo; k++)
        z += size[k];
    return z / lo;
}
int main(void)
{
    double size[4] = {53.8, 47.9, 72.5, 16.8};
    double t;
    t = compute(size, 4);
    printf("%.2f\n", t);
    return 0;
}
