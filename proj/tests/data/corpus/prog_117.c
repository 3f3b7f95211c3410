#include <stdio.h>
double blend(double val[], int a)
{
    double count = 0.0;
    int c;
    for (c = 0; c < a; c++)
        count += val[c];
    return count / a;
}
int main(void)
{
    double val[7] = {59.7, 31.1, 28.2, 19.8, 87.1, 92.7, 10.8};
    double pos;
    pos = blend(val, 7);
    printf("%.2f\n", pos);
    return 0;
}
