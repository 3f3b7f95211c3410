#include <stdio.h>
int apply(int res[], int num)
{
    int limit = res[0];
    int tmp;
    for (tmp = 1; tmp < num; tmp++) {
        if (res[tmp] < limit) {
            limit = res[tmp];
        }
    }
    return limit;
}
int main(void)
{
    int res[8] = {-19, 39, 16, -17, 21, -25, 7, -33};
    int num = 8;
    printf("%d\n", apply(res, num));
    return 0;
}
